#include "nsc/energy.hpp"

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <string>

namespace nsc::energy {

namespace {

constexpr double kParamSlack = 1e-12;

double quad(const Matrix& A, const Vector& x) { return x.dot(A * x); }

// (x' + x)^T A (x' - x) / 2
double quad_increment(const Matrix& A, const Vector& next, const Vector& prev) {
  return 0.5 * (next + prev).dot(A * (next - prev));
}

void require_dim(const LagrangianModel& model, const Vector& x, const char* field) {
  if (x.size() != model.n()) {
    fail(ErrorCode::DimensionMismatch, field,
         "expected dimension " + std::to_string(model.n()) + ", got " + std::to_string(x.size()));
  }
}

void require_filters(const SchemeSpec& spec) {
  if (spec.is_moreau_family()) {
    fail(ErrorCode::NotApplicable, "scheme.variant", "Moreau-Jean schemes have no algorithmic energy");
  }
  if (!spec.filters_well_defined()) {
    fail(ErrorCode::NotApplicable, "scheme.alpha_m",
         "nu = 0 with eta != 0 has no finite filter form (alpha_m = 1/2, alpha_f != 1/2)");
  }
}

double max_abs(std::initializer_list<double> values) {
  double out = 0.0;
  for (double v : values) {
    out = std::max(out, std::abs(v));
  }
  return out;
}

bool le(double a, double b) { return a <= b + kParamSlack; }

}  // namespace

double total_energy(const LagrangianModel& model, const Vector& q, const Vector& v) {
  require_dim(model, q, "q");
  require_dim(model, v, "v");
  return 0.5 * quad(model.mass(), v) + 0.5 * quad(model.stiffness(), q);
}

double energy_increment(const LagrangianModel& model, const SystemState& prev, const SystemState& next) {
  return quad_increment(model.mass(), next.v, prev.v) + quad_increment(model.stiffness(), next.q, prev.q);
}

double filter_energy_coefficient(const SchemeSpec& spec) {
  const double nu = spec.nu();
  const double eta = spec.eta();
  if (eta == 0.0 || nu == 0.0) {
    return 0.0;
  }
  return eta / (2.0 * nu * nu) * (nu - (spec.gamma - 0.5));
}

double intermediate_energy(const LagrangianModel& model, const SystemState& state, const SchemeSpec& spec, double h) {
  if (spec.is_moreau_family()) {
    fail(ErrorCode::NotApplicable, "scheme.variant", "Moreau-Jean schemes have no algorithmic energy");
  }
  require_dim(model, state.a, "a");
  return total_energy(model, state.q, state.v) +
         0.25 * h * h * (2.0 * spec.beta - spec.gamma) * quad(model.mass(), state.a);
}

double algorithmic_energy(const LagrangianModel& model, const SystemState& state, const SchemeSpec& spec, double h) {
  require_filters(spec);
  double H = intermediate_energy(model, state, spec, h);
  const double cz = filter_energy_coefficient(spec);
  if (cz != 0.0) {
    H += cz * quad(model.stiffness(), state.z);
  }
  return H;
}

double algorithmic_energy_increment(const LagrangianModel& model, const SystemState& prev, const SystemState& next,
                                    const SchemeSpec& spec, double h) {
  require_filters(spec);
  double dH = energy_increment(model, prev, next);
  dH += 0.5 * h * h * (2.0 * spec.beta - spec.gamma) * quad_increment(model.mass(), next.a, prev.a);
  const double cz = filter_energy_coefficient(spec);
  if (cz != 0.0) {
    dH += 2.0 * cz * quad_increment(model.stiffness(), next.z, prev.z);
  }
  return dH;
}

FilterState update_filters(const LagrangianModel& model, const SystemState& prev, const SystemState& next, double h,
                           const SchemeSpec& spec) {
  (void)h;
  if (spec.is_moreau_family()) {
    return {prev.z, prev.x, prev.y};
  }
  const double nu = spec.nu();
  const double lead = 0.5 + nu;
  const double lag = 0.5 - nu;
  if (!(lead > 0.0)) {
    fail(ErrorCode::InvalidSpec, "scheme.alpha_m", "filter requires alpha_m < 1");
  }
  const Vector f_prev = model.forcing().evaluate(prev.t);
  const Vector f_next = model.forcing().evaluate(next.t);
  FilterState out;
  out.z = (nu * (next.q - prev.q) - lag * prev.z) / lead;
  out.x = (nu * (next.v - prev.v) - lag * prev.x) / lead;
  out.y = (nu * (f_next - f_prev) - lag * prev.y) / lead;
  return out;
}

Works discrete_works(const LagrangianModel& model, const SystemState& prev, const SystemState& next, double h,
                     const SchemeSpec& spec) {
  const Matrix& C = model.damping();
  const Vector f_k = model.forcing().evaluate(prev.t);
  const Vector f_next = model.forcing().evaluate(next.t);
  const Vector dq = next.q - prev.q;
  Works w;
  switch (spec.variant) {
    case SchemeVariant::MoreauJean: {
      const double th = spec.theta;
      const Vector v_th = (1.0 - th) * prev.v + th * next.v;
      const Vector f_th = (1.0 - th) * f_k + th * f_next;
      w.external = h * v_th.dot(f_th);
      w.damping = -h * v_th.dot(C * v_th);
      break;
    }
    case SchemeVariant::MoreauJeanVariant: {
      const double th = spec.theta;
      w.external = dq.dot((1.0 - th) * f_k + th * f_next);
      w.damping = -dq.dot(C * ((1.0 - th) * prev.v + th * next.v));
      break;
    }
    case SchemeVariant::NonsmoothHHT: {
      if (prev.f_prev.size() != model.n() || prev.v_prev.size() != model.n()) {
        fail(ErrorCode::MissingHistory, "state.f_prev", "HHT works need F_{k-1} and v_{k-1}");
      }
      const double g = spec.gamma;
      const double al = spec.alpha_f;
      const Vector f_kg = g * f_next + (1.0 - g) * f_k;
      const Vector f_km1g = g * f_k + (1.0 - g) * prev.f_prev;
      const Vector v_kg = g * next.v + (1.0 - g) * prev.v;
      const Vector v_km1g = g * prev.v + (1.0 - g) * prev.v_prev;
      w.external = dq.dot((1.0 - al) * f_kg + al * f_km1g);
      w.damping = -dq.dot(C * ((1.0 - al) * v_kg + al * v_km1g));
      break;
    }
    default: {
      const double g = spec.gamma;
      w.external = dq.dot(g * f_next + (1.0 - g) * f_k);
      w.damping = -dq.dot(C * (g * next.v + (1.0 - g) * prev.v));
      break;
    }
  }
  return w;
}

double contact_work(const Vector& U_prev, const Vector& U_next, const Vector& P, double weight) {
  if (P.size() == 0) {
    return 0.0;
  }
  return ((1.0 - weight) * U_prev + weight * U_next).dot(P);
}

IdentityTerms identity_residual(const LagrangianModel& model, const SchemeSpec& spec, double h,
                                const SystemState& prev, const SystemState& next, const StepRecord& record) {
  if (record.P.size() != model.m() || record.U_prev.size() != model.m() || record.U_next.size() != model.m()) {
    fail(ErrorCode::MissingHistory, "record", "step record lacks impulses or local velocities");
  }
  const Matrix& M = model.mass();
  const Matrix& K = model.stiffness();
  const Vector dq = next.q - prev.q;
  const Works works = discrete_works(model, prev, next, h, spec);
  const double dqK = quad(K, dq);
  IdentityTerms out;

  if (spec.is_moreau_family()) {
    const double th = spec.theta;
    const double dE = energy_increment(model, prev, next);
    out.lhs = dE - works.external - works.damping;
    if (spec.variant == SchemeVariant::MoreauJean) {
      const double dvM = quad(M, next.v - prev.v);
      const double contact = contact_work(record.U_prev, record.U_next, record.P, th);
      out.rhs = (0.5 - th) * (dvM + dqK) + contact;
      out.scale = max_abs({dE, works.external, works.damping, (0.5 - th) * dvM, (0.5 - th) * dqK, contact});
    } else {
      const double contact = contact_work(record.U_prev, record.U_next, record.P, 0.5);
      out.rhs = (0.5 - th) * dqK + contact;
      out.scale = max_abs({dE, works.external, works.damping, (0.5 - th) * dqK, contact});
    }
    out.residual = out.lhs - out.rhs;
    return out;
  }

  require_filters(spec);
  const double g = spec.gamma;
  const double b = spec.beta;
  const double dH = algorithmic_energy_increment(model, prev, next, spec, h);
  const double daM = quad(M, next.a - prev.a);
  const double dzK = quad(K, next.z - prev.z);
  const double contact = contact_work(record.U_prev, record.U_next, record.P, 0.5);
  const double accel_term = -0.5 * h * h * (g - 0.5) * (2.0 * b - g) * daM;
  double extra = 0.0;
  double stiff_term = 0.0;
  double filter_term = 0.0;

  switch (spec.variant) {
    case SchemeVariant::NonsmoothNewmark:
      stiff_term = (0.5 - g) * dqK;
      break;
    case SchemeVariant::NonsmoothHHT: {
      const double al = spec.alpha_f;
      stiff_term = -(g - 0.5 - al) * dqK;
      filter_term = -2.0 * al * (1.0 - g) * dzK;
      break;
    }
    case SchemeVariant::NonsmoothGeneralizedAlpha: {
      const Vector y_g = g * next.y + (1.0 - g) * prev.y;
      const Vector x_g = g * next.x + (1.0 - g) * prev.x;
      extra = spec.eta_over_nu() * dq.dot(y_g - model.damping() * x_g);
      [[fallthrough]];
    }
    case SchemeVariant::NonsmoothKHGeneralizedAlpha: {
      const double eta = spec.eta();
      const double nu = spec.nu();
      stiff_term = -(g - 0.5 - eta) * dqK;
      filter_term = -spec.eta_over_nu() * (nu - g + 0.5) * dzK;
      break;
    }
    default: break;
  }
  out.lhs = dH - works.external - works.damping + extra;
  out.rhs = contact + accel_term + stiff_term + filter_term;
  out.residual = out.lhs - out.rhs;
  out.scale = max_abs({dH, works.external, works.damping, extra, contact, accel_term, stiff_term, filter_term});
  return out;
}

bool dissipation_condition(const LagrangianModel& model, const SchemeSpec& spec) {
  const double g = spec.gamma;
  const double b = spec.beta;
  const bool newmark_bounds = le(g, 2.0 * b) && le(0.5, g);
  switch (spec.variant) {
    case SchemeVariant::MoreauJean: {
      const double th = spec.theta;
      bool ok = le(0.5, th);
      for (Eigen::Index i = 0; i < model.m(); ++i) {
        ok = ok && le(th * (1.0 + model.restitution()(i)), 1.0);
      }
      return ok;
    }
    case SchemeVariant::MoreauJeanVariant: return le(0.5, spec.theta);
    case SchemeVariant::NonsmoothNewmark: return newmark_bounds;
    case SchemeVariant::NonsmoothHHT: {
      const double al = spec.alpha_f;
      return newmark_bounds && le(0.0, al) && le(al, g - 0.5) && le(g - 0.5, 0.5);
    }
    case SchemeVariant::NonsmoothKHGeneralizedAlpha:
    case SchemeVariant::NonsmoothGeneralizedAlpha: {
      const double eta = spec.eta();
      const bool kh = newmark_bounds && le(0.0, eta) && le(eta, g - 0.5) && le(g - 0.5, spec.nu());
      if (spec.variant == SchemeVariant::NonsmoothKHGeneralizedAlpha) {
        return kh;
      }
      // Only with C = 0 and constant load do the x, y filter terms vanish.
      return kh && !model.has_damping() && model.forcing().is_time_invariant();
    }
  }
  return false;
}

DissipationFlags dissipation_check(const LagrangianModel& model, const SchemeSpec& spec, double h,
                                   const SystemState& prev, const SystemState& next, const StepRecord& record,
                                   double tol) {
  DissipationFlags flags;
  flags.condition_satisfied = dissipation_condition(model, spec);
  flags.condition_satisfied_active = flags.condition_satisfied;
  if (spec.variant == SchemeVariant::MoreauJean) {
    bool ok = le(0.5, spec.theta);
    for (Eigen::Index i = 0; i < record.P.size(); ++i) {
      if (record.P(i) > 0.0) {
        ok = ok && le(spec.theta * (1.0 + model.restitution()(i)), 1.0);
      }
    }
    flags.condition_satisfied_active = ok;
  }
  const Works works = discrete_works(model, prev, next, h, spec);
  const double delta = spec.is_moreau_family() ? energy_increment(model, prev, next)
                                               : algorithmic_energy_increment(model, prev, next, spec, h);
  flags.dissipation = delta - works.external - works.damping;
  flags.dissipation_satisfied = flags.dissipation <= tol;
  return flags;
}

void audit_step(const LagrangianModel& model, const SchemeSpec& spec, double h, const SystemState& prev,
                const SystemState& next, StepRecord& record, double residual_tol) {
  record.audited = true;
  record.E_prev = total_energy(model, prev.q, prev.v);
  record.E_next = total_energy(model, next.q, next.v);
  const Works works = discrete_works(model, prev, next, h, spec);
  record.W_ext = works.external;
  record.W_damping = works.damping;
  const double weight = spec.variant == SchemeVariant::MoreauJean ? spec.theta : 0.5;
  record.contact_work = contact_work(record.U_prev, record.U_next, record.P, weight);
  try {
    if (spec.is_moreau_family()) {
      record.H_prev = record.E_prev;
      record.H_next = record.E_next;
    } else {
      record.H_prev = algorithmic_energy(model, prev, spec, h);
      record.H_next = algorithmic_energy(model, next, spec, h);
    }
    const IdentityTerms terms = identity_residual(model, spec, h, prev, next, record);
    record.identity_residual = terms.residual;
    record.identity_scale = terms.scale;
    record.identity_tolerance = residual_tol * (1.0 + terms.scale);
    record.identity_ok = std::abs(terms.residual) <= record.identity_tolerance;
    const DissipationFlags flags =
        dissipation_check(model, spec, h, prev, next, record, record.identity_tolerance);
    record.condition_satisfied = flags.condition_satisfied;
    record.condition_satisfied_active = flags.condition_satisfied_active;
    record.dissipation = flags.dissipation;
    record.dissipation_satisfied = flags.dissipation_satisfied;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NotApplicable) {
      throw;
    }
    record.H_prev = record.H_next = std::numeric_limits<double>::quiet_NaN();
    record.identity_residual = std::numeric_limits<double>::quiet_NaN();
    record.identity_ok = false;
    record.condition_satisfied = false;
    record.condition_satisfied_active = false;
    record.dissipation_satisfied = false;
  }
}

}  // namespace nsc::energy
