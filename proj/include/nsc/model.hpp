#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <vector>

#include "nsc/error.hpp"

namespace nsc {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// External load F(t). Only closed forms are supported so the load can be
/// sampled at arbitrary grid points without derivatives.
class ForcingTerm {
 public:
  enum class Kind { Zero, Constant, Sinusoidal, PiecewiseConstant };

  static ForcingTerm zero(Eigen::Index n);
  static ForcingTerm constant(Vector value);
  /// F(t) = amplitude * sin(omega * t + phase)
  static ForcingTerm sinusoidal(Vector amplitude, double omega, double phase);
  /// values[0] on [0, b_0), values[i] on [b_{i-1}, b_i), values.back() after
  /// the last breakpoint. Breakpoints must be strictly increasing.
  static ForcingTerm piecewise_constant(std::vector<double> breakpoints, std::vector<Vector> values);

  Vector evaluate(double t) const;

  Kind kind() const { return kind_; }
  Eigen::Index size() const { return amplitude_.size(); }
  bool is_time_invariant() const {
    return kind_ == Kind::Zero || kind_ == Kind::Constant ||
           (kind_ == Kind::PiecewiseConstant && breakpoints_.empty());
  }
  const Vector& amplitude() const { return amplitude_; }
  double omega() const { return omega_; }
  double phase() const { return phase_; }

 private:
  ForcingTerm() = default;

  Kind kind_ = Kind::Zero;
  Vector amplitude_;
  double omega_ = 0.0;
  double phase_ = 0.0;
  std::vector<double> breakpoints_;
  std::vector<Vector> values_;
};

struct ModelInput {
  Matrix mass;
  Matrix damping;
  Matrix stiffness;
  Matrix contact_jacobian;  // n x m, column alpha is the gradient of g^alpha
  Vector gap_offset;
  Vector restitution;
  ForcingTerm forcing = ForcingTerm::zero(0);
};

/// Linear mechanical system M v' + C v + K q = F(t) + G lambda with unilateral
/// constraints g(q) = G^T q + w >= 0. Immutable once built.
class LagrangianModel {
 public:
  Eigen::Index n() const { return mass_.rows(); }
  Eigen::Index m() const { return contact_jacobian_.cols(); }

  const Matrix& mass() const { return mass_; }
  const Matrix& damping() const { return damping_; }
  const Matrix& stiffness() const { return stiffness_; }
  const Matrix& contact_jacobian() const { return contact_jacobian_; }
  const Vector& gap_offset() const { return gap_offset_; }
  const Vector& restitution() const { return restitution_; }
  const ForcingTerm& forcing() const { return forcing_; }
  const Eigen::LLT<Matrix>& mass_factor() const { return mass_llt_; }

  bool has_damping() const { return !damping_.isZero(0.0); }

  Vector solve_mass(const Vector& rhs) const { return mass_llt_.solve(rhs); }

 private:
  friend LagrangianModel build_model(ModelInput input);
  LagrangianModel() = default;

  Matrix mass_;
  Matrix damping_;
  Matrix stiffness_;
  Matrix contact_jacobian_;
  Vector gap_offset_;
  Vector restitution_;
  ForcingTerm forcing_ = ForcingTerm::zero(0);
  Eigen::LLT<Matrix> mass_llt_;
};

/// Validates dimensions, symmetry (|A - A^T|_max <= 1e-12 (1 + |A|_max)),
/// definiteness and restitution bounds. Throws Error naming the field.
LagrangianModel build_model(ModelInput input);

Vector gap(const LagrangianModel& model, const Vector& q);
Vector local_velocity(const LagrangianModel& model, const Vector& v);

bool is_symmetric(const Matrix& a, double rel_tol = 1e-12);

/// Time-stepping state. a is the Newmark acceleration, a_tilde the smooth
/// acceleration-like variable, z/x/y the filter states used by the energy
/// audit of the alpha schemes; f_prev/v_prev hold F_{k-1} and v_{k-1}.
struct SystemState {
  double t = 0.0;
  Vector q;
  Vector v;
  Vector a;
  Vector a_tilde;
  Vector z;
  Vector x;
  Vector y;
  Vector f_prev;
  Vector v_prev;
};

/// State at t0 with consistent acceleration a = a_tilde = M^-1 (F(t0) - K q0 - C v0),
/// zero filter states, and the virtual step -1 set to (F(t0), v0).
SystemState initial_state(const LagrangianModel& model, const Vector& q0, const Vector& v0, double t0 = 0.0);

}  // namespace nsc
