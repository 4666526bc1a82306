#include "nsc/model.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <string>

namespace nsc {

namespace {

std::string dims(const Matrix& a) { return std::to_string(a.rows()) + "x" + std::to_string(a.cols()); }

void require_finite(const Matrix& a, const char* field) {
  if (!a.allFinite()) {
    fail(ErrorCode::InvalidSpec, field, "contains non-finite entries");
  }
}

void require_semi_definite(const Matrix& a, const char* field) {
  if (a.size() == 0 || a.isZero(0.0)) {
    return;
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(a, Eigen::EigenvaluesOnly);
  const Vector& values = eig.eigenvalues();
  const double norm = values.cwiseAbs().maxCoeff();
  if (values.minCoeff() < -1e-10 * norm) {
    fail(ErrorCode::NotSemiDefinite, field,
         "smallest eigenvalue " + std::to_string(values.minCoeff()) + " below -1e-10*|A|_2");
  }
}

}  // namespace

ForcingTerm ForcingTerm::zero(Eigen::Index n) {
  ForcingTerm f;
  f.kind_ = Kind::Zero;
  f.amplitude_ = Vector::Zero(n);
  return f;
}

ForcingTerm ForcingTerm::constant(Vector value) {
  ForcingTerm f;
  f.kind_ = Kind::Constant;
  f.amplitude_ = std::move(value);
  return f;
}

ForcingTerm ForcingTerm::sinusoidal(Vector amplitude, double omega, double phase) {
  if (!std::isfinite(omega) || !std::isfinite(phase)) {
    fail(ErrorCode::InvalidForcing, "forcing.omega", "angular frequency and phase must be finite");
  }
  ForcingTerm f;
  f.kind_ = Kind::Sinusoidal;
  f.amplitude_ = std::move(amplitude);
  f.omega_ = omega;
  f.phase_ = phase;
  return f;
}

ForcingTerm ForcingTerm::piecewise_constant(std::vector<double> breakpoints, std::vector<Vector> values) {
  if (values.size() != breakpoints.size() + 1) {
    fail(ErrorCode::InvalidForcing, "forcing.values", "need one more value than breakpoints");
  }
  for (std::size_t i = 1; i < breakpoints.size(); ++i) {
    if (!(breakpoints[i] > breakpoints[i - 1])) {
      fail(ErrorCode::InvalidForcing, "forcing.breakpoints", "breakpoints must be strictly increasing");
    }
  }
  for (const auto& v : values) {
    if (v.size() != values.front().size()) {
      fail(ErrorCode::InvalidForcing, "forcing.values", "all values must share one dimension");
    }
  }
  ForcingTerm f;
  f.kind_ = Kind::PiecewiseConstant;
  f.amplitude_ = values.front();
  f.breakpoints_ = std::move(breakpoints);
  f.values_ = std::move(values);
  return f;
}

Vector ForcingTerm::evaluate(double t) const {
  switch (kind_) {
    case Kind::Zero: return Vector::Zero(amplitude_.size());
    case Kind::Constant: return amplitude_;
    case Kind::Sinusoidal: return amplitude_ * std::sin(omega_ * t + phase_);
    case Kind::PiecewiseConstant: {
      const auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), t);
      return values_[static_cast<std::size_t>(it - breakpoints_.begin())];
    }
  }
  return amplitude_;
}

bool is_symmetric(const Matrix& a, double rel_tol) {
  if (a.rows() != a.cols()) {
    return false;
  }
  if (a.size() == 0) {
    return true;
  }
  const double scale = 1.0 + a.cwiseAbs().maxCoeff();
  return (a - a.transpose()).cwiseAbs().maxCoeff() <= rel_tol * scale;
}

LagrangianModel build_model(ModelInput input) {
  const Eigen::Index n = input.mass.rows();
  if (n == 0 || input.mass.cols() != n) {
    fail(ErrorCode::DimensionMismatch, "mass", "must be square and non-empty, got " + dims(input.mass));
  }
  if (input.damping.size() == 0) {
    input.damping = Matrix::Zero(n, n);
  }
  if (input.stiffness.size() == 0) {
    input.stiffness = Matrix::Zero(n, n);
  }
  if (input.damping.rows() != n || input.damping.cols() != n) {
    fail(ErrorCode::DimensionMismatch, "damping", "expected " + dims(input.mass) + ", got " + dims(input.damping));
  }
  if (input.stiffness.rows() != n || input.stiffness.cols() != n) {
    fail(ErrorCode::DimensionMismatch, "stiffness",
         "expected " + dims(input.mass) + ", got " + dims(input.stiffness));
  }
  if (input.contact_jacobian.rows() != n) {
    fail(ErrorCode::DimensionMismatch, "contact_jacobian",
         "expected " + std::to_string(n) + " rows, got " + dims(input.contact_jacobian));
  }
  const Eigen::Index m = input.contact_jacobian.cols();
  if (input.gap_offset.size() != m) {
    fail(ErrorCode::DimensionMismatch, "gap_offset",
         "expected " + std::to_string(m) + " entries, got " + std::to_string(input.gap_offset.size()));
  }
  if (input.restitution.size() != m) {
    fail(ErrorCode::DimensionMismatch, "restitution",
         "expected " + std::to_string(m) + " entries, got " + std::to_string(input.restitution.size()));
  }
  if (input.forcing.kind() == ForcingTerm::Kind::Zero && input.forcing.size() == 0) {
    input.forcing = ForcingTerm::zero(n);
  }
  if (input.forcing.size() != n) {
    fail(ErrorCode::DimensionMismatch, "forcing",
         "expected dimension " + std::to_string(n) + ", got " + std::to_string(input.forcing.size()));
  }
  require_finite(input.mass, "mass");
  require_finite(input.damping, "damping");
  require_finite(input.stiffness, "stiffness");
  require_finite(input.contact_jacobian, "contact_jacobian");
  require_finite(input.gap_offset, "gap_offset");

  if (!is_symmetric(input.mass)) {
    fail(ErrorCode::NonSymmetric, "mass", "|M - M^T|_max exceeds 1e-12 (1 + |M|_max)");
  }
  if (!is_symmetric(input.damping)) {
    fail(ErrorCode::NonSymmetric, "damping", "|C - C^T|_max exceeds 1e-12 (1 + |C|_max)");
  }
  if (!is_symmetric(input.stiffness)) {
    fail(ErrorCode::NonSymmetric, "stiffness", "|K - K^T|_max exceeds 1e-12 (1 + |K|_max)");
  }
  for (Eigen::Index i = 0; i < m; ++i) {
    const double e = input.restitution(i);
    if (!(e >= 0.0 && e <= 1.0)) {
      fail(ErrorCode::RestitutionOutOfRange, "restitution",
           "e[" + std::to_string(i) + "] = " + std::to_string(e) + " outside [0, 1]");
    }
  }

  LagrangianModel model;
  // Symmetrize so later congruences stay exactly symmetric.
  model.mass_ = 0.5 * (input.mass + input.mass.transpose());
  model.damping_ = 0.5 * (input.damping + input.damping.transpose());
  model.stiffness_ = 0.5 * (input.stiffness + input.stiffness.transpose());
  model.mass_llt_.compute(model.mass_);
  if (model.mass_llt_.info() != Eigen::Success) {
    fail(ErrorCode::NotPositiveDefinite, "mass", "Cholesky factorization failed");
  }
  const Matrix& l = model.mass_llt_.matrixLLT();
  if ((l.diagonal().array() <= 0.0).any() || !l.allFinite()) {
    fail(ErrorCode::NotPositiveDefinite, "mass", "Cholesky factor has a non-positive pivot");
  }
  require_semi_definite(model.damping_, "damping");
  require_semi_definite(model.stiffness_, "stiffness");

  model.contact_jacobian_ = std::move(input.contact_jacobian);
  model.gap_offset_ = std::move(input.gap_offset);
  model.restitution_ = std::move(input.restitution);
  model.forcing_ = std::move(input.forcing);
  return model;
}

Vector gap(const LagrangianModel& model, const Vector& q) {
  if (q.size() != model.n()) {
    fail(ErrorCode::DimensionMismatch, "q", "expected " + std::to_string(model.n()) + " coordinates");
  }
  return model.contact_jacobian().transpose() * q + model.gap_offset();
}

Vector local_velocity(const LagrangianModel& model, const Vector& v) {
  if (v.size() != model.n()) {
    fail(ErrorCode::DimensionMismatch, "v", "expected " + std::to_string(model.n()) + " velocities");
  }
  return model.contact_jacobian().transpose() * v;
}

SystemState initial_state(const LagrangianModel& model, const Vector& q0, const Vector& v0, double t0) {
  if (q0.size() != model.n()) {
    fail(ErrorCode::DimensionMismatch, "q0", "expected " + std::to_string(model.n()) + " coordinates");
  }
  if (v0.size() != model.n()) {
    fail(ErrorCode::DimensionMismatch, "v0", "expected " + std::to_string(model.n()) + " velocities");
  }
  SystemState s;
  s.t = t0;
  s.q = q0;
  s.v = v0;
  const Vector f0 = model.forcing().evaluate(t0);
  s.a = model.solve_mass(f0 - model.stiffness() * q0 - model.damping() * v0);
  s.a_tilde = s.a;
  s.z = Vector::Zero(model.n());
  s.x = Vector::Zero(model.n());
  s.y = Vector::Zero(model.n());
  s.f_prev = f0;
  s.v_prev = v0;
  return s;
}

}  // namespace nsc
