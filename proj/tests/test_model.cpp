#include <random>

#include "doctest.h"
#include "nsc/model.hpp"

using namespace nsc;

namespace {

Matrix m1(double x) { return Matrix::Constant(1, 1, x); }

ModelInput ball_input() {
  ModelInput in;
  in.mass = m1(1.0);
  in.contact_jacobian = m1(1.0);
  in.gap_offset = Vector::Zero(1);
  in.restitution = Vector::Ones(1);
  in.forcing = ForcingTerm::constant(Vector::Constant(1, -9.81));
  return in;
}

template <class F>
ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::Io;
}

Matrix random_spd(std::mt19937& rng, int n) {
  std::normal_distribution<double> d;
  Matrix A(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) A(i, j) = d(rng);
  return A.transpose() * A + n * Matrix::Identity(n, n);
}

}  // namespace

TEST_CASE("bouncing ball model builds") {
  const LagrangianModel model = build_model(ball_input());
  CHECK(model.n() == 1);
  CHECK(model.m() == 1);
  CHECK(model.stiffness()(0, 0) == 0.0);
  CHECK(model.damping()(0, 0) == 0.0);
  CHECK_FALSE(model.has_damping());
  CHECK(model.forcing().evaluate(3.0)(0) == -9.81);
  CHECK(model.forcing().is_time_invariant());
}

TEST_CASE("restitution outside [0, 1] is rejected") {
  ModelInput in;
  in.mass = Matrix::Identity(2, 2);
  in.contact_jacobian = Matrix::Zero(2, 1);
  in.contact_jacobian(0, 0) = 1.0;
  in.gap_offset = Vector::Zero(1);
  in.restitution = Vector::Constant(1, 1.5);
  CHECK(code_of([&] { build_model(in); }) == ErrorCode::RestitutionOutOfRange);
  in.restitution(0) = -0.1;
  CHECK(code_of([&] { build_model(in); }) == ErrorCode::RestitutionOutOfRange);
}

TEST_CASE("zero mass is not positive definite") {
  ModelInput in = ball_input();
  in.mass = m1(0.0);
  CHECK(code_of([&] { build_model(in); }) == ErrorCode::NotPositiveDefinite);
}

TEST_CASE("errors name the offending field") {
  ModelInput in = ball_input();
  in.mass = m1(-1.0);
  try {
    build_model(in);
    FAIL("expected failure");
  } catch (const Error& e) {
    CHECK(e.field() == "mass");
  }
}

TEST_CASE("dimension mismatches are reported") {
  ModelInput in = ball_input();
  in.gap_offset = Vector::Zero(2);
  CHECK(code_of([&] { build_model(in); }) == ErrorCode::DimensionMismatch);
  in = ball_input();
  in.stiffness = Matrix::Identity(2, 2);
  CHECK(code_of([&] { build_model(in); }) == ErrorCode::DimensionMismatch);
  const LagrangianModel model = build_model(ball_input());
  CHECK(code_of([&] { gap(model, Vector::Zero(2)); }) == ErrorCode::DimensionMismatch);
  CHECK(code_of([&] { local_velocity(model, Vector::Zero(3)); }) == ErrorCode::DimensionMismatch);
}

TEST_CASE("indefinite stiffness is rejected, rank-deficient stiffness accepted") {
  ModelInput in;
  in.mass = Matrix::Identity(2, 2);
  in.stiffness = Matrix(2, 2);
  in.stiffness << 1.0, -1.0, -1.0, 1.0;
  in.contact_jacobian = Matrix::Zero(2, 0);
  in.gap_offset = Vector::Zero(0);
  in.restitution = Vector::Zero(0);
  CHECK_NOTHROW(build_model(in));
  in.stiffness << 1.0, 2.0, 2.0, 1.0;
  CHECK(code_of([&] { build_model(in); }) == ErrorCode::NotSemiDefinite);
}

TEST_CASE("gap and local velocity") {
  const LagrangianModel ball = build_model(ball_input());
  CHECK(gap(ball, Vector::Constant(1, 0.3))(0) == doctest::Approx(0.3));
  CHECK(local_velocity(ball, Vector::Constant(1, -2.0))(0) == -2.0);

  ModelInput touching = ball_input();
  touching.gap_offset = Vector::Constant(1, -1.0);
  CHECK(gap(build_model(touching), Vector::Constant(1, 1.0))(0) == 0.0);

  ModelInput two;
  two.mass = Matrix::Identity(2, 2);
  two.contact_jacobian = Matrix::Zero(2, 1);
  two.contact_jacobian(0, 0) = 1.0;
  two.gap_offset = Vector::Zero(1);
  two.restitution = Vector::Ones(1);
  Vector v(2);
  v << 3.0, 5.0;
  CHECK(local_velocity(build_model(two), v)(0) == 3.0);
}

TEST_CASE("gap and local velocity match a transpose-product oracle and are linear") {
  std::mt19937 rng(7);
  std::normal_distribution<double> d;
  ModelInput in;
  in.mass = random_spd(rng, 4);
  in.contact_jacobian = Matrix(4, 2);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 2; ++j) in.contact_jacobian(i, j) = d(rng);
  in.gap_offset = Vector(2);
  in.gap_offset << 0.25, -0.5;
  in.restitution = Vector::Constant(2, 0.5);
  const Matrix G = in.contact_jacobian;
  const Vector w = in.gap_offset;
  const LagrangianModel model = build_model(in);
  for (int trial = 0; trial < 20; ++trial) {
    Vector q1(4), q2(4);
    for (int i = 0; i < 4; ++i) {
      q1(i) = d(rng);
      q2(i) = d(rng);
    }
    for (int a = 0; a < 2; ++a) {
      double dot = 0.0;
      for (int i = 0; i < 4; ++i) dot += G(i, a) * q1(i);
      CHECK(local_velocity(model, q1)(a) == doctest::Approx(dot).epsilon(1e-14));
      CHECK(gap(model, q1)(a) == doctest::Approx(dot + w(a)).epsilon(1e-14));
    }
    const Vector lhs = gap(model, q1 + q2) - w;
    const Vector rhs = (gap(model, q1) - w) + (gap(model, q2) - w);
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() <= 1e-13);
    CHECK((local_velocity(model, 2.5 * q1) - 2.5 * local_velocity(model, q1)).cwiseAbs().maxCoeff() <= 1e-13);
  }
}

TEST_CASE("asymmetric perturbations above tolerance are rejected") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(1e-9, 1e-3);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 + trial % 5;
    ModelInput in;
    in.mass = random_spd(rng, n);
    in.contact_jacobian = Matrix::Zero(n, 0);
    in.gap_offset = Vector::Zero(0);
    in.restitution = Vector::Zero(0);
    CHECK_NOTHROW(build_model(in));
    const double scale = in.mass.cwiseAbs().maxCoeff();
    in.mass(0, n - 1) += u(rng) * (1.0 + scale);
    CHECK(code_of([&] { build_model(in); }) == ErrorCode::NonSymmetric);
  }
}

TEST_CASE("symmetry check tolerates roundoff") {
  Matrix A(2, 2);
  A << 2.0, 1.0, 1.0 + 1e-15, 2.0;
  CHECK(is_symmetric(A));
  A(1, 0) = 1.0 + 1e-9;
  CHECK_FALSE(is_symmetric(A));
}

TEST_CASE("consistent initial acceleration") {
  std::mt19937 rng(3);
  ModelInput in;
  in.mass = random_spd(rng, 5);
  in.stiffness = random_spd(rng, 5);
  in.damping = 0.1 * random_spd(rng, 5);
  in.contact_jacobian = Matrix::Zero(5, 0);
  in.gap_offset = Vector::Zero(0);
  in.restitution = Vector::Zero(0);
  in.forcing = ForcingTerm::sinusoidal(Vector::LinSpaced(5, 1.0, 2.0), 2.0, 0.4);
  const LagrangianModel model = build_model(in);
  const Vector q0 = Vector::LinSpaced(5, -1.0, 1.0);
  const Vector v0 = Vector::LinSpaced(5, 0.5, -0.5);
  const SystemState s = initial_state(model, q0, v0, 0.3);
  const Vector r = model.mass() * s.a + model.stiffness() * q0 + model.damping() * v0 - model.forcing().evaluate(0.3);
  CHECK(r.cwiseAbs().maxCoeff() <= 1e-12 * (1.0 + model.stiffness().norm()));
  CHECK(s.a == s.a_tilde);
  CHECK(s.z.isZero(0.0));
  CHECK(s.x.isZero(0.0));
  CHECK(s.y.isZero(0.0));
  CHECK(s.f_prev == model.forcing().evaluate(0.3));
  CHECK(s.v_prev == v0);
  CHECK(code_of([&] { initial_state(model, Vector::Zero(4), v0); }) == ErrorCode::DimensionMismatch);
}

TEST_CASE("forcing terms") {
  const ForcingTerm s = ForcingTerm::sinusoidal(Vector::Constant(1, 2.0), 3.0, 0.5);
  CHECK(s.evaluate(0.7)(0) == doctest::Approx(2.0 * std::sin(3.0 * 0.7 + 0.5)));
  CHECK_FALSE(s.is_time_invariant());
  const ForcingTerm p =
      ForcingTerm::piecewise_constant({1.0, 2.0}, {Vector::Constant(1, 1.0), Vector::Constant(1, 2.0),
                                                   Vector::Constant(1, 3.0)});
  CHECK(p.evaluate(0.5)(0) == 1.0);
  CHECK(p.evaluate(1.0)(0) == 2.0);
  CHECK(p.evaluate(5.0)(0) == 3.0);
  CHECK(code_of([] { ForcingTerm::piecewise_constant({2.0, 1.0}, {Vector::Zero(1), Vector::Zero(1), Vector::Zero(1)}); }) ==
        ErrorCode::InvalidForcing);
  CHECK(ForcingTerm::zero(3).evaluate(1.0).isZero(0.0));
}
