#pragma once

#include "nsc/record.hpp"
#include "nsc/scheme.hpp"

namespace nsc::energy {

/// E = 1/2 v^T M v + 1/2 q^T K q
double total_energy(const LagrangianModel& model, const Vector& q, const Vector& v);

/// E_{k+1} - E_k in factored form, free of cancellation against the energy level.
double energy_increment(const LagrangianModel& model, const SystemState& prev, const SystemState& next);

/// K(q, v, a) = E + h^2/4 (2 beta - gamma) a^T M a, the Newmark energy that H extends.
double intermediate_energy(const LagrangianModel& model, const SystemState& state, const SchemeSpec& spec, double h);

/// H(q, v, a, z) = E + h^2/4 (2 beta - gamma) a^T M a + eta/(2 nu^2) (nu - (gamma - 1/2)) z^T K z.
/// The z term is dropped when eta = 0 (Newmark) or nu = 0 (z is identically zero).
/// Throws NotApplicable for the Moreau-Jean schemes.
double algorithmic_energy(const LagrangianModel& model, const SystemState& state, const SchemeSpec& spec, double h);

double algorithmic_energy_increment(const LagrangianModel& model, const SystemState& prev, const SystemState& next,
                                    const SchemeSpec& spec, double h);

/// Coefficient of z^T K z in H.
double filter_energy_coefficient(const SchemeSpec& spec);

struct FilterState {
  Vector z;
  Vector x;
  Vector y;
};

/// Midpoint discretization of the first-order filter nu h s' + s = nu h r':
/// (1/2 + nu) s_{k+1} + (1/2 - nu) s_k = nu (r_{k+1} - r_k), for (z,q), (x,v), (y,F).
FilterState update_filters(const LagrangianModel& model, const SystemState& prev, const SystemState& next, double h,
                           const SchemeSpec& spec);

struct Works {
  double external = 0.0;
  double damping = 0.0;
};

/// Scheme-specific discrete works of the external and damping forces.
/// HHT uses F_{k-1}, v_{k-1} from prev.f_prev / prev.v_prev (MissingHistory when absent).
Works discrete_works(const LagrangianModel& model, const SystemState& prev, const SystemState& next, double h,
                     const SchemeSpec& spec);

/// ((1 - weight) U_prev + weight U_next)^T P
double contact_work(const Vector& U_prev, const Vector& U_next, const Vector& P, double weight);

struct IdentityTerms {
  double lhs = 0.0;
  double rhs = 0.0;
  double residual = 0.0;  // lhs - rhs
  double scale = 0.0;     // largest magnitude among the terms
};

/// Per-step discrete energy identity of the scheme (dissipation equality for
/// Moreau-Jean, algorithmic-energy balance for the alpha schemes). Zero up to
/// roundoff for a correct step.
IdentityTerms identity_residual(const LagrangianModel& model, const SchemeSpec& spec, double h,
                                const SystemState& prev, const SystemState& next, const StepRecord& record);

struct DissipationFlags {
  bool condition_satisfied = false;         // scheme parameters meet the dissipation hypothesis
  bool condition_satisfied_active = false;  // Moreau-Jean: hypothesis over impulsed contacts only
  bool dissipation_satisfied = false;       // (dE or dH) - W_ext - W_damping <= tol
  double dissipation = 0.0;
};

/// Parameter hypothesis of the scheme's dissipation result, independent of any step.
bool dissipation_condition(const LagrangianModel& model, const SchemeSpec& spec);

DissipationFlags dissipation_check(const LagrangianModel& model, const SchemeSpec& spec, double h,
                                   const SystemState& prev, const SystemState& next, const StepRecord& record,
                                   double tol);

/// Fills every energy field of the record. Residual tolerance is residual_tol * (1 + scale).
void audit_step(const LagrangianModel& model, const SchemeSpec& spec, double h, const SystemState& prev,
                const SystemState& next, StepRecord& record, double residual_tol);

}  // namespace nsc::energy
