#include <cmath>

#include "doctest.h"
#include "nsc/integrators.hpp"
#include "nsc/scenarios.hpp"

using namespace nsc;

namespace {

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

}  // namespace

TEST_CASE("bouncing ball construction") {
  const ScenarioSpec spec;
  const Scenario s = build_scenario(spec);
  CHECK(s.model.n() == 1);
  CHECK(s.model.m() == 1);
  CHECK(s.model.stiffness().isZero(0.0));
  CHECK(s.model.damping().isZero(0.0));
  CHECK(s.model.forcing().is_time_invariant());
  CHECK(s.model.forcing().evaluate(0.0)(0) == -9.81);
  CHECK(s.model.contact_jacobian()(0, 0) == 1.0);
  CHECK(s.model.gap_offset()(0) == 0.0);
  CHECK(s.state.q(0) == 1.0);
  CHECK(s.state.v(0) == 0.0);
}

TEST_CASE("bar chain stiffness matches a hand assembly for n = 3") {
  ScenarioSpec spec;
  spec.kind = ScenarioKind::ElasticBarChain;
  spec.segments = 3;
  spec.total_mass = 1.5;
  spec.stiffness = 2.0;
  const Scenario s = build_scenario(spec);
  Matrix K(3, 3);
  K << 2, -2, 0, -2, 4, -2, 0, -2, 2;
  CHECK((s.model.stiffness() - K).cwiseAbs().maxCoeff() == 0.0);
  CHECK((s.model.mass() - 0.5 * Matrix::Identity(3, 3)).cwiseAbs().maxCoeff() == 0.0);
  CHECK(s.model.contact_jacobian().col(0).sum() == 1.0);
  CHECK(s.model.contact_jacobian()(0, 0) == 1.0);
}

TEST_CASE("bar chain of ten: tridiagonal with zero interior row sums") {
  ScenarioSpec spec;
  spec.kind = ScenarioKind::ElasticBarChain;
  spec.segments = 10;
  spec.standoff = 0.02;
  const Scenario s = build_scenario(spec);
  const Matrix& K = s.model.stiffness();
  for (int i = 0; i < 10; ++i) {
    CHECK(std::abs(K.row(i).sum()) <= 1e-12);
    for (int j = 0; j < 10; ++j) {
      if (std::abs(i - j) > 1) CHECK(K(i, j) == 0.0);
    }
  }
  CHECK(K(0, 1) == -1000.0);
  CHECK(s.model.mass().trace() == doctest::Approx(1.0));
  CHECK(gap(s.model, s.state.q)(0) == doctest::Approx(0.02));
}

TEST_CASE("two balls exchange velocities under an elastic impact") {
  ScenarioSpec spec;
  spec.kind = ScenarioKind::TwoBallImpact;
  const Scenario s = build_scenario(spec);
  CHECK(gap(s.model, s.state.q)(0) == doctest::Approx(1.0));
  const Trajectory tr = simulate(s.model, s.state, 1e-3, SchemeSpec::moreau_jean(0.5), 2.0);
  bool impacted = false;
  for (std::size_t k = 0; k < tr.records.size(); ++k) {
    const StepRecord& r = tr.records[k];
    const Vector& v = tr.states[k + 1].v;
    CHECK(v.sum() == doctest::Approx(1.0).epsilon(1e-14));
    if (r.P(0) > 0.0) {
      impacted = true;
      CHECK(r.U_prev(0) == doctest::Approx(-1.0));
      CHECK(r.U_next(0) == doctest::Approx(1.0));
      CHECK(v(0) == doctest::Approx(0.0).epsilon(1e-14));
      CHECK(v(1) == doctest::Approx(1.0));
      // G^T-orthogonal to the momentum direction: the impulse is internal.
      CHECK((s.model.contact_jacobian().transpose() * Vector::Ones(2))(0) == 0.0);
    }
  }
  CHECK(impacted);
}

TEST_CASE("oscillator construction") {
  ScenarioSpec spec;
  spec.kind = ScenarioKind::ForcedOscillatorContact;
  const Scenario s = build_scenario(spec);
  CHECK(s.model.stiffness()(0, 0) == 100.0);
  CHECK_FALSE(s.model.forcing().is_time_invariant());
  CHECK(s.model.forcing().evaluate(0.5)(0) == doctest::Approx(std::sin(1.5)));
}

TEST_CASE("invalid specs are rejected") {
  ScenarioSpec spec;
  spec.mass = 0.0;
  CHECK(code_of([&] { build_scenario(spec); }) == ErrorCode::InvalidSpec);
  spec = ScenarioSpec{};
  spec.kind = ScenarioKind::ElasticBarChain;
  spec.segments = 0;
  CHECK(code_of([&] { build_scenario(spec); }) == ErrorCode::InvalidSpec);
  spec.segments = 3;
  spec.stiffness = -1.0;
  CHECK(code_of([&] { build_scenario(spec); }) == ErrorCode::InvalidSpec);
  spec = ScenarioSpec{};
  spec.restitution = 1.2;
  CHECK(code_of([&] { build_scenario(spec); }) == ErrorCode::InvalidSpec);
  spec = ScenarioSpec{};
  spec.kind = ScenarioKind::TwoBallImpact;
  spec.mass2 = -1.0;
  CHECK(code_of([&] { build_scenario(spec); }) == ErrorCode::InvalidSpec);
  CHECK(code_of([] { parse_scenario_kind("pendulum"); }) == ErrorCode::InvalidSpec);
  CHECK(parse_scenario_kind("elastic_bar_chain") == ScenarioKind::ElasticBarChain);
}

TEST_CASE("ball reference: first impact time and speed") {
  const ScenarioSpec spec;
  const auto [t_hit, speed] = ball_first_impact(spec);
  CHECK(t_hit == doctest::Approx(std::sqrt(2.0 / 9.81)).epsilon(1e-14));
  CHECK(t_hit == doctest::Approx(0.45152).epsilon(1e-5));
  CHECK(speed == doctest::Approx(4.42945).epsilon(1e-5));
  const auto before = reference_solution(spec, t_hit - 1e-9);
  const auto after = reference_solution(spec, t_hit + 1e-9);
  CHECK(before.second(0) == doctest::Approx(-4.42945).epsilon(1e-5));
  CHECK(after.second(0) == doctest::Approx(4.42945).epsilon(1e-5));
  // Periodic: back at the release height after one full flight.
  const auto top = reference_solution(spec, 2.0 * t_hit);
  CHECK(top.first(0) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("ball reference needs e = 1") {
  ScenarioSpec spec;
  spec.restitution = 0.5;
  CHECK(code_of([&] { reference_solution(spec, 1.0); }) == ErrorCode::NotAvailable);
}

TEST_CASE("chain and two-ball scenarios have no reference") {
  ScenarioSpec spec;
  spec.kind = ScenarioKind::ElasticBarChain;
  CHECK(code_of([&] { reference_solution(spec, 1.0); }) == ErrorCode::NotAvailable);
  spec.kind = ScenarioKind::TwoBallImpact;
  CHECK(code_of([&] { reference_solution(spec, 1.0); }) == ErrorCode::NotAvailable);
}

TEST_CASE("oscillator reference satisfies the ODE in every damping regime") {
  for (double c : {0.0, 2.0, 20.0, 50.0}) {  // under, under, critical (2 sqrt(km) = 20), over
    ScenarioSpec spec;
    spec.kind = ScenarioKind::ForcedOscillatorContact;
    spec.damping = c;
    spec.q0 = 0.3;
    spec.v0 = -0.7;
    spec.phase = 0.2;
    const auto at0 = reference_solution(spec, 0.0);
    CHECK(at0.first(0) == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(at0.second(0) == doctest::Approx(-0.7).epsilon(1e-12));
    for (double t : {0.1, 0.5, 1.3}) {
      const double d = 1e-5;
      const auto p = reference_solution(spec, t + d);
      const auto m = reference_solution(spec, t - d);
      const auto c0 = reference_solution(spec, t);
      const double vel_fd = (p.first(0) - m.first(0)) / (2 * d);
      const double acc_fd = (p.second(0) - m.second(0)) / (2 * d);
      CHECK(vel_fd == doctest::Approx(c0.second(0)).epsilon(1e-8));
      const double residual = acc_fd + c * c0.second(0) + 100.0 * c0.first(0) - std::sin(3.0 * t + 0.2);
      CHECK(std::abs(residual) <= 1e-4);
    }
  }
}

TEST_CASE("oscillator reference: pure particular response matches the sinusoid") {
  ScenarioSpec spec;
  spec.kind = ScenarioKind::ForcedOscillatorContact;
  // Start on the particular solution X sin(wt + phase) with X = A / (k - m w^2).
  const double X = 1.0 / (100.0 - 9.0);
  spec.q0 = X * std::sin(0.0);
  spec.v0 = 3.0 * X;
  for (double t : {0.0, 0.37, 2.5, 10.0}) {
    const auto r = reference_solution(spec, t);
    CHECK(std::abs(r.first(0) - X * std::sin(3.0 * t)) <= 1e-12);
    CHECK(std::abs(r.second(0) - 3.0 * X * std::cos(3.0 * t)) <= 1e-12);
  }
}

TEST_CASE("oscillator at undamped resonance has no bounded reference") {
  ScenarioSpec spec;
  spec.kind = ScenarioKind::ForcedOscillatorContact;
  spec.omega = 10.0;
  CHECK(code_of([&] { reference_solution(spec, 1.0); }) == ErrorCode::NotAvailable);
}

TEST_CASE("simulated ball impact time converges at first order") {
  const ScenarioSpec spec;
  const double t_star = ball_first_impact(spec).first;
  std::vector<double> errors;
  for (double h : {1e-2, 1e-3, 1e-4}) {
    const Scenario s = build_scenario(spec);
    const Trajectory tr = simulate(s.model, s.state, h, SchemeSpec::moreau_jean(0.5), 0.6, {false});
    double t_hit = -1.0;
    for (const StepRecord& r : tr.records) {
      if (r.P(0) > 0.0) {
        t_hit = r.t;
        break;
      }
    }
    REQUIRE(t_hit > 0.0);
    errors.push_back(std::abs(t_hit - t_star));
    CHECK(errors.back() <= h);
  }
}

TEST_CASE("every scenario model passes model validation") {
  for (ScenarioKind k : {ScenarioKind::BouncingBall, ScenarioKind::TwoBallImpact, ScenarioKind::ElasticBarChain,
                         ScenarioKind::ForcedOscillatorContact}) {
    ScenarioSpec spec;
    spec.kind = k;
    CHECK_NOTHROW(build_scenario(spec));
    CHECK(to_string(parse_scenario_kind(to_string(k))) == to_string(k));
  }
}
