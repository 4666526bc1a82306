#pragma once

#include <limits>
#include <vector>

#include "nsc/model.hpp"

namespace nsc {

/// Everything one step produces: the contact solution from the integrator and
/// the discrete energy bookkeeping filled in by the audit.
struct StepRecord {
  std::size_t step = 0;  // k + 1
  double t = 0.0;        // t_{k+1}

  Vector P;       // impulses P_{k+1}
  Vector U_prev;  // U_k
  Vector U_next;  // U_{k+1}
  Vector w_corr;  // M^-1 G P_{k+1}
  std::vector<int> active_set;
  std::vector<int> zero_impulse_set;
  int lcp_iterations = 0;
  double penetration = 0.0;  // max(0, -min_alpha g^alpha(q_{k+1}))

  // Filled by energy::audit_step.
  bool audited = false;
  double E_prev = 0.0;
  double E_next = 0.0;
  double H_prev = 0.0;
  double H_next = 0.0;
  double W_ext = 0.0;
  double W_damping = 0.0;
  double contact_work = 0.0;
  double dissipation = 0.0;  // (dE or dH) - W_ext - W_damping
  double identity_residual = std::numeric_limits<double>::quiet_NaN();
  double identity_scale = 1.0;
  double identity_tolerance = 0.0;
  bool identity_ok = false;
  bool condition_satisfied = false;
  bool condition_satisfied_active = false;
  bool dissipation_satisfied = false;
};

}  // namespace nsc
