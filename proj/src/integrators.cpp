#include "nsc/integrators.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "nsc/energy.hpp"

namespace nsc {

namespace {

Matrix principal_submatrix(const Matrix& a, const std::vector<int>& idx) {
  const auto k = static_cast<Eigen::Index>(idx.size());
  Matrix out(k, k);
  for (Eigen::Index r = 0; r < k; ++r) {
    for (Eigen::Index c = 0; c < k; ++c) {
      out(r, c) = a(idx[static_cast<std::size_t>(r)], idx[static_cast<std::size_t>(c)]);
    }
  }
  return out;
}

struct ContactSolution {
  Vector P;
  std::vector<int> active;
  int iterations = 0;
};

// Impulses on the active set: free step first, LCP only when the free
// velocities violate (U_{k+1} + e U_k >= 0) on I_1.
ContactSolution resolve_contacts(const LagrangianModel& model, const IterationMatrixCache& cache,
                                 const SystemState& state, const Vector& U_free, const Vector& U_prev,
                                 const StepOptions& options) {
  ContactSolution out;
  out.P = Vector::Zero(model.m());
  out.active = active_set(model, state, cache.h());
  if (out.active.empty()) {
    return out;
  }
  const auto s = static_cast<Eigen::Index>(out.active.size());
  lcp::LcpProblem problem;
  problem.b.resize(s);
  for (Eigen::Index i = 0; i < s; ++i) {
    const int alpha = out.active[static_cast<std::size_t>(i)];
    problem.b(i) = U_free(alpha) + model.restitution()(alpha) * U_prev(alpha);
  }
  if (problem.b.minCoeff() >= 0.0) {
    return out;
  }
  problem.W = principal_submatrix(cache.delassus(), out.active);

  lcp::LcpSolution sol = options.lcp_method == LcpMethod::Lemke ? lcp::solve_lemke(problem, options.lcp_tol)
                                                                 : lcp::solve_pgs(problem, options.lcp_tol);
  if (sol.status != lcp::LcpStatus::Solved && s <= 12) {
    sol = lcp::solve_enumeration(problem, options.lcp_tol);
  }
  if (sol.status != lcp::LcpStatus::Solved) {
    fail(ErrorCode::LcpFailure, "lcp",
         "contact problem of size " + std::to_string(s) + " not solved (residual " + std::to_string(sol.residual) +
             ")");
  }
  for (Eigen::Index i = 0; i < s; ++i) {
    out.P(out.active[static_cast<std::size_t>(i)]) = sol.z(i);
  }
  out.iterations = sol.iterations;
  return out;
}

void fill_record(const LagrangianModel& model, const SystemState& prev, const SystemState& next,
                 const ContactSolution& contacts, const Vector& U_prev, StepRecord& record) {
  record.t = next.t;
  record.P = contacts.P;
  record.U_prev = U_prev;
  record.U_next = local_velocity(model, next.v);
  record.w_corr = model.solve_mass(model.contact_jacobian() * contacts.P);
  record.active_set = contacts.active;
  record.zero_impulse_set.clear();
  for (int alpha : contacts.active) {
    if (contacts.P(alpha) == 0.0) {
      record.zero_impulse_set.push_back(alpha);
    }
  }
  record.lcp_iterations = contacts.iterations;
  const Vector g = gap(model, next.q);
  record.penetration = g.size() ? std::max(0.0, -g.minCoeff()) : 0.0;
  (void)prev;
}

StepResult step_moreau(const LagrangianModel& model, const IterationMatrixCache& cache, const SystemState& state,
                       const StepOptions& options) {
  const SchemeSpec& spec = cache.spec();
  const double h = cache.h();
  const double theta = spec.theta;
  const Matrix& K = model.stiffness();
  const Matrix& C = model.damping();
  const Vector f_k = model.forcing().evaluate(state.t);
  const Vector f_next = model.forcing().evaluate(state.t + h);
  const Vector f_theta = (1.0 - theta) * f_k + theta * f_next;

  // Both variants share the right-hand side; only the K weight of the
  // iteration matrix differs.
  const Vector rhs = h * f_theta - h * (K * state.q) - h * (C * state.v) - h * h * theta * (K * state.v);
  const Vector v_free = state.v + cache.solve(rhs);
  const Vector U_prev = local_velocity(model, state.v);
  const Vector U_free = local_velocity(model, v_free);
  const ContactSolution contacts = resolve_contacts(model, cache, state, U_free, U_prev, options);

  StepResult out;
  SystemState& next = out.state;
  next.t = state.t + h;
  next.v = v_free + cache.impulse_response() * contacts.P;
  if (spec.variant == SchemeVariant::MoreauJean) {
    next.q = state.q + h * ((1.0 - theta) * state.v + theta * next.v);
  } else {
    next.q = state.q + 0.5 * h * (state.v + next.v);
  }
  next.a = model.solve_mass(f_next - K * next.q - C * next.v);
  next.a_tilde = next.a;
  next.z = state.z;
  next.x = state.x;
  next.y = state.y;
  next.f_prev = f_k;
  next.v_prev = state.v;
  fill_record(model, state, next, contacts, U_prev, out.record);
  return out;
}

StepResult step_alpha(const LagrangianModel& model, const IterationMatrixCache& cache, const SystemState& state,
                      const StepOptions& options) {
  const SchemeSpec& spec = cache.spec();
  const double h = cache.h();
  const double gamma = spec.gamma;
  const double beta = spec.beta;
  const double am = spec.alpha_m;
  const double af = spec.alpha_f;
  const Matrix& M = model.mass();
  const Matrix& K = model.stiffness();
  const Matrix& C = model.damping();
  const Vector f_k = model.forcing().evaluate(state.t);
  const Vector f_next = model.forcing().evaluate(state.t + h);

  const Vector q_pred = state.q + h * state.v + h * h * (0.5 - beta) * state.a;
  const Vector v_pred = state.v + h * (1.0 - gamma) * state.a;

  Vector rhs;
  if (spec.variant == SchemeVariant::NonsmoothKHGeneralizedAlpha) {
    rhs = (1.0 - am) * (f_next - C * v_pred) - am * (M * state.a + C * state.v - f_k) - (1.0 - af) * (K * q_pred) -
          af * (K * state.q);
  } else {
    rhs = (1.0 - af) * (f_next - K * q_pred - C * v_pred) + af * (M * state.a_tilde) - am * (M * state.a);
  }
  const Vector a_free = cache.solve(rhs);
  const Vector v_free = v_pred + h * gamma * a_free;
  const Vector U_prev = local_velocity(model, state.v);
  const Vector U_free = local_velocity(model, v_free);
  const ContactSolution contacts = resolve_contacts(model, cache, state, U_free, U_prev, options);

  StepResult out;
  SystemState& next = out.state;
  next.t = state.t + h;
  const Vector w = cache.impulse_response() * contacts.P;
  next.a = a_free - cache.acceleration_response() * contacts.P;
  next.v = v_pred + h * gamma * next.a + w;
  next.q = q_pred + h * h * beta * next.a + 0.5 * h * w;
  next.a_tilde = model.solve_mass(f_next - K * next.q - C * next.v);
  next.f_prev = f_k;
  next.v_prev = state.v;
  next.z = state.z;
  next.x = state.x;
  next.y = state.y;
  const energy::FilterState filters = energy::update_filters(model, state, next, h, spec);
  next.z = filters.z;
  next.x = filters.x;
  next.y = filters.y;
  fill_record(model, state, next, contacts, U_prev, out.record);
  return out;
}

void require_state(const LagrangianModel& model, const SystemState& s) {
  const Eigen::Index n = model.n();
  auto check = [&](const Vector& v, const char* name) {
    if (v.size() != n) {
      fail(ErrorCode::DimensionMismatch, std::string("state.") + name,
           "expected dimension " + std::to_string(n) + ", got " + std::to_string(v.size()));
    }
  };
  check(s.q, "q");
  check(s.v, "v");
  check(s.a, "a");
  check(s.a_tilde, "a_tilde");
  check(s.z, "z");
  check(s.x, "x");
  check(s.y, "y");
}

}  // namespace

std::vector<int> active_set(const LagrangianModel& model, const SystemState& state, double h) {
  const Vector forecast = gap(model, state.q + h * state.v);
  const Vector U = local_velocity(model, state.v);
  std::vector<int> out;
  for (Eigen::Index alpha = 0; alpha < model.m(); ++alpha) {
    if (forecast(alpha) <= 0.0 && U(alpha) <= kActiveVelocityTol) {
      out.push_back(static_cast<int>(alpha));
    }
  }
  return out;
}

IterationMatrixCache::IterationMatrixCache(const LagrangianModel& model, const SchemeSpec& spec, double h)
    : spec_(spec), h_(h) {
  spec.validate();
  if (!(h > 0.0) || !std::isfinite(h)) {
    fail(ErrorCode::InvalidSpec, "run.h", "step size must be positive");
  }
  const Matrix& M = model.mass();
  const Matrix& K = model.stiffness();
  const Matrix& C = model.damping();
  const Matrix& G = model.contact_jacobian();
  const double theta = spec.theta;
  const double gamma = spec.gamma;
  const double beta = spec.beta;
  const double am = spec.alpha_m;
  const double af = spec.alpha_f;

  Matrix coupling_rhs;
  switch (spec.variant) {
    case SchemeVariant::MoreauJean:
      iteration_ = M + h * theta * C + h * h * theta * theta * K;
      break;
    case SchemeVariant::MoreauJeanVariant:
      iteration_ = M + h * theta * C + 0.5 * h * h * theta * K;
      break;
    case SchemeVariant::NonsmoothKHGeneralizedAlpha:
      iteration_ = (1.0 - am) * (M + h * gamma * C) + (1.0 - af) * h * h * beta * K;
      coupling_rhs = (1.0 - am) * C + (1.0 - af) * 0.5 * h * K;
      break;
    default:
      iteration_ = (1.0 - am) * M + (1.0 - af) * (h * h * beta * K + h * gamma * C);
      coupling_rhs = (1.0 - af) * (0.5 * h * K + C);
      break;
  }
  factor_.compute(iteration_);
  if (factor_.info() != Eigen::Success || !factor_.matrixLLT().allFinite()) {
    fail(ErrorCode::SingularIterationMatrix, "scheme",
         "iteration matrix of " + spec.describe() + " is not positive definite for h = " + std::to_string(h));
  }
  if (spec.is_moreau_family()) {
    impulse_response_ = factor_.solve(G);
    delassus_ = G.transpose() * impulse_response_;
    delassus_ = 0.5 * (delassus_ + delassus_.transpose());
  } else {
    impulse_response_ = model.mass_factor().solve(G);
    coupling_ = factor_.solve(coupling_rhs);
    acceleration_response_ = coupling_ * impulse_response_;
    delassus_ = G.transpose() * (impulse_response_ - h * gamma * acceleration_response_);
  }
}

bool IterationMatrixCache::matches(const SchemeSpec& spec, double h) const {
  return h == h_ && spec.variant == spec_.variant && spec.theta == spec_.theta && spec.gamma == spec_.gamma &&
         spec.beta == spec_.beta && spec.alpha_m == spec_.alpha_m && spec.alpha_f == spec_.alpha_f;
}

StepResult step(const LagrangianModel& model, const IterationMatrixCache& cache, const SystemState& state,
                const StepOptions& options) {
  require_state(model, state);
  return cache.spec().is_moreau_family() ? step_moreau(model, cache, state, options)
                                         : step_alpha(model, cache, state, options);
}

StepResult step_moreau_jean(const LagrangianModel& model, const SystemState& state, double h, double theta) {
  return step(model, IterationMatrixCache(model, SchemeSpec::moreau_jean(theta), h), state);
}

StepResult step_moreau_jean_variant(const LagrangianModel& model, const SystemState& state, double h,
                                    double theta) {
  return step(model, IterationMatrixCache(model, SchemeSpec::moreau_jean_variant(theta), h), state);
}

StepResult step_generalized_alpha(const LagrangianModel& model, const SystemState& state, double h,
                                  const SchemeSpec& spec) {
  if (spec.variant != SchemeVariant::NonsmoothNewmark && spec.variant != SchemeVariant::NonsmoothHHT &&
      spec.variant != SchemeVariant::NonsmoothGeneralizedAlpha) {
    fail(ErrorCode::InconsistentSpec, "scheme.variant", "expected Newmark, HHT or generalized-alpha");
  }
  return step(model, IterationMatrixCache(model, spec, h), state);
}

StepResult step_kh_generalized_alpha(const LagrangianModel& model, const SystemState& state, double h,
                                     const SchemeSpec& spec) {
  if (spec.variant != SchemeVariant::NonsmoothKHGeneralizedAlpha) {
    fail(ErrorCode::InconsistentSpec, "scheme.variant", "expected the KH generalized-alpha scheme");
  }
  return step(model, IterationMatrixCache(model, spec, h), state);
}

std::size_t step_count(double t0, double t_end, double h) {
  if (!(h > 0.0)) {
    fail(ErrorCode::InvalidSpec, "run.h", "step size must be positive");
  }
  if (t_end < t0) {
    fail(ErrorCode::InvalidSpec, "run.t_end", "end time precedes start time");
  }
  const double steps = (t_end - t0) / h;
  return static_cast<std::size_t>(std::ceil(steps - 1e-9));
}

Trajectory simulate(const LagrangianModel& model, const SystemState& initial, double h, const SchemeSpec& spec,
                    double t_end, const AuditFlags& flags, const StepOptions& options) {
  const std::size_t n_steps = step_count(initial.t, t_end, h);
  Trajectory traj;
  traj.states.reserve(n_steps + 1);
  traj.records.reserve(n_steps);
  traj.states.push_back(initial);
  if (n_steps == 0) {
    return traj;
  }
  const IterationMatrixCache cache(model, spec, h);
  for (std::size_t k = 0; k < n_steps; ++k) {
    const SystemState& prev = traj.states.back();
    StepResult result;
    try {
      result = step(model, cache, prev, options);
    } catch (const Error& e) {
      throw Error(e.code(), e.field(), "step " + std::to_string(k + 1) + ": " + e.what());
    }
    result.record.step = k + 1;
    if (flags.audit) {
      energy::audit_step(model, spec, h, prev, result.state, result.record, flags.residual_tol);
    }
    traj.records.push_back(std::move(result.record));
    traj.states.push_back(std::move(result.state));
  }
  return traj;
}

}  // namespace nsc
