#pragma once

#include <Eigen/Cholesky>
#include <memory>
#include <utility>
#include <vector>

#include "nsc/lcp.hpp"
#include "nsc/record.hpp"
#include "nsc/scheme.hpp"

namespace nsc {

/// Tolerance on U_k <= 0 in the active-set rule, admits resting contacts at
/// numerical zero.
constexpr double kActiveVelocityTol = 1e-12;

/// I_1 = { alpha : (G^T (q_k + h v_k) + w)^alpha <= 0 and U_k^alpha <= 0 }.
std::vector<int> active_set(const LagrangianModel& model, const SystemState& state, double h);

enum class LcpMethod { Lemke, Pgs };

struct StepOptions {
  LcpMethod lcp_method = LcpMethod::Lemke;
  double lcp_tol = lcp::kDefaultTol;
};

/// Factorized iteration matrix of one scheme for a fixed step size, and the
/// Delassus operator over the full contact set. Built once per (h, spec).
class IterationMatrixCache {
 public:
  IterationMatrixCache(const LagrangianModel& model, const SchemeSpec& spec, double h);

  double h() const { return h_; }
  const SchemeSpec& spec() const { return spec_; }
  bool matches(const SchemeSpec& spec, double h) const;

  const Matrix& matrix() const { return iteration_; }
  const Matrix& delassus() const { return delassus_; }
  /// Moreau family: W^-1 G. Alpha family: M^-1 G.
  const Matrix& impulse_response() const { return impulse_response_; }
  /// Alpha family: S^-1 B_w M^-1 G, the acceleration response to impulses.
  const Matrix& acceleration_response() const { return acceleration_response_; }
  /// Alpha family: S^-1 B_w, maps a velocity correction to the acceleration response.
  const Matrix& acceleration_coupling() const { return coupling_; }
  Vector solve(const Vector& rhs) const { return factor_.solve(rhs); }

 private:
  SchemeSpec spec_;
  double h_;
  Matrix iteration_;
  Eigen::LLT<Matrix> factor_;
  Matrix impulse_response_;
  Matrix acceleration_response_;
  Matrix coupling_;
  Matrix delassus_;
};

struct StepResult {
  SystemState state;
  StepRecord record;
};

/// One step under the scheme held by the cache.
StepResult step(const LagrangianModel& model, const IterationMatrixCache& cache, const SystemState& state,
                const StepOptions& options = {});

StepResult step_moreau_jean(const LagrangianModel& model, const SystemState& state, double h, double theta);
StepResult step_moreau_jean_variant(const LagrangianModel& model, const SystemState& state, double h, double theta);
StepResult step_generalized_alpha(const LagrangianModel& model, const SystemState& state, double h,
                                  const SchemeSpec& spec);
StepResult step_kh_generalized_alpha(const LagrangianModel& model, const SystemState& state, double h,
                                     const SchemeSpec& spec);

struct AuditFlags {
  bool audit = true;
  double residual_tol = 1e-10;
};

struct Trajectory {
  std::vector<SystemState> states;  // states[0] is the initial state
  std::vector<StepRecord> records;  // records[k] advances states[k] -> states[k+1]
};

/// Number of uniform steps covering [t0, t_end].
std::size_t step_count(double t0, double t_end, double h);

/// Runs the scheme over [t0, t_end] with uniform h. Errors carry the failing step index.
Trajectory simulate(const LagrangianModel& model, const SystemState& initial, double h, const SchemeSpec& spec,
                    double t_end, const AuditFlags& flags = {}, const StepOptions& options = {});

}  // namespace nsc
