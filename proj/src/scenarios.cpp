#include "nsc/scenarios.hpp"

#include <cmath>
#include <string>

namespace nsc {

namespace {

void require(bool ok, const char* field, const std::string& msg) {
  if (!ok) {
    fail(ErrorCode::InvalidSpec, field, msg);
  }
}

bool finite(double x) { return std::isfinite(x); }

Matrix scalar(double x) { return Matrix::Constant(1, 1, x); }

Vector pair_or(const Vector& given, double a, double b) {
  if (given.size() == 2) {
    return given;
  }
  Vector out(2);
  out << a, b;
  return out;
}

// Free-free chain of n equal springs between neighbouring nodes.
Matrix path_laplacian(int n, double k) {
  Matrix K = Matrix::Zero(n, n);
  for (int i = 0; i + 1 < n; ++i) {
    K(i, i) += k;
    K(i + 1, i + 1) += k;
    K(i, i + 1) -= k;
    K(i + 1, i) -= k;
  }
  return K;
}

struct Motion {
  double q;
  double v;
};

// Free response of m y'' + c y' + k y = 0 from (y0, yd0), k > 0.
Motion homogeneous(double m, double c, double k, double y0, double yd0, double t) {
  const double wn = std::sqrt(k / m);
  const double zeta = c / (2.0 * std::sqrt(k * m));
  if (zeta < 1.0) {
    const double wd = wn * std::sqrt(1.0 - zeta * zeta);
    const double sigma = zeta * wn;
    const double A = y0;
    const double B = (yd0 + sigma * y0) / wd;
    const double decay = std::exp(-sigma * t);
    const double cs = std::cos(wd * t);
    const double sn = std::sin(wd * t);
    return {decay * (A * cs + B * sn), decay * ((B * wd - sigma * A) * cs - (A * wd + sigma * B) * sn)};
  }
  if (zeta == 1.0) {
    const double B = yd0 + wn * y0;
    const double decay = std::exp(-wn * t);
    return {decay * (y0 + B * t), decay * (B - wn * (y0 + B * t))};
  }
  const double root = wn * std::sqrt(zeta * zeta - 1.0);
  const double r1 = -zeta * wn + root;
  const double r2 = -zeta * wn - root;
  const double c1 = (yd0 - r2 * y0) / (r1 - r2);
  const double c2 = y0 - c1;
  const double e1 = std::exp(r1 * t);
  const double e2 = std::exp(r2 * t);
  return {c1 * e1 + c2 * e2, c1 * r1 * e1 + c2 * r2 * e2};
}

std::pair<Vector, Vector> pack(double q, double v) {
  return {Vector::Constant(1, q), Vector::Constant(1, v)};
}

std::pair<Vector, Vector> ball_reference(const ScenarioSpec& spec, double t) {
  if (spec.restitution != 1.0) {
    fail(ErrorCode::NotAvailable, "scenario.restitution", "closed form needs e = 1");
  }
  const double g = spec.gravity;
  const double q0 = spec.q0;
  const double v0 = spec.v0;
  if (g == 0.0) {
    if (v0 >= 0.0) {
      return pack(q0 + v0 * t, v0);
    }
    const double t_hit = q0 / -v0;
    if (t < t_hit) {
      return pack(q0 + v0 * t, v0);
    }
    return pack(-v0 * (t - t_hit), -v0);
  }
  if (g < 0.0) {
    fail(ErrorCode::NotAvailable, "scenario.gravity", "closed form needs gravity pointing at the floor");
  }
  const auto [t_hit, speed] = ball_first_impact(spec);
  if (t < t_hit) {
    return pack(q0 + v0 * t - 0.5 * g * t * t, v0 - g * t);
  }
  if (speed == 0.0) {
    return pack(0.0, 0.0);
  }
  const double period = 2.0 * speed / g;
  const double tau = std::fmod(t - t_hit, period);
  return pack(speed * tau - 0.5 * g * tau * tau, speed - g * tau);
}

std::pair<Vector, Vector> oscillator_reference(const ScenarioSpec& spec, double t) {
  const double m = spec.mass;
  const double c = spec.damping;
  const double k = spec.spring;
  const double w = spec.omega;
  const double D = k - m * w * w;
  const double E = c * w;
  const double den = D * D + E * E;
  if (den == 0.0) {
    fail(ErrorCode::NotAvailable, "scenario.omega", "undamped resonance has no bounded closed form");
  }
  // Particular solution X sin(wt + phase) + Y cos(wt + phase).
  const double X = spec.amplitude * D / den;
  const double Y = -spec.amplitude * E / den;
  const auto particular = [&](double s) -> Motion {
    const double arg = w * s + spec.phase;
    return {X * std::sin(arg) + Y * std::cos(arg), w * (X * std::cos(arg) - Y * std::sin(arg))};
  };
  const Motion p0 = particular(0.0);
  const Motion hom = homogeneous(m, c, k, spec.q0 - p0.q, spec.v0 - p0.v, t);
  const Motion pt = particular(t);
  return pack(hom.q + pt.q, hom.v + pt.v);
}

}  // namespace

std::string_view to_string(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::BouncingBall: return "bouncing_ball";
    case ScenarioKind::TwoBallImpact: return "two_ball_impact";
    case ScenarioKind::ElasticBarChain: return "elastic_bar_chain";
    case ScenarioKind::ForcedOscillatorContact: return "forced_oscillator_contact";
  }
  return "unknown";
}

ScenarioKind parse_scenario_kind(std::string_view name) {
  for (ScenarioKind k : {ScenarioKind::BouncingBall, ScenarioKind::TwoBallImpact, ScenarioKind::ElasticBarChain,
                         ScenarioKind::ForcedOscillatorContact}) {
    if (name == to_string(k)) {
      return k;
    }
  }
  fail(ErrorCode::InvalidSpec, "scenario.kind", "unknown scenario '" + std::string(name) + "'");
}

void ScenarioSpec::validate() const {
  require(finite(restitution) && restitution >= 0.0 && restitution <= 1.0, "scenario.restitution",
          "must lie in [0, 1]");
  switch (kind) {
    case ScenarioKind::BouncingBall:
      require(finite(mass) && mass > 0.0, "scenario.mass", "must be positive");
      require(finite(gravity), "scenario.gravity", "must be finite");
      require(finite(q0) && q0 >= 0.0, "scenario.q0", "initial height must be finite and non-negative");
      require(finite(v0), "scenario.v0", "must be finite");
      break;
    case ScenarioKind::TwoBallImpact: {
      require(finite(mass1) && mass1 > 0.0, "scenario.mass1", "must be positive");
      require(finite(mass2) && mass2 > 0.0, "scenario.mass2", "must be positive");
      require(finite(gap0), "scenario.gap0", "must be finite");
      require(q0_pair.size() == 0 || q0_pair.size() == 2, "scenario.q0_pair", "needs two entries");
      require(v0_pair.size() == 0 || v0_pair.size() == 2, "scenario.v0_pair", "needs two entries");
      require(q0_pair.allFinite() && v0_pair.allFinite(), "scenario.q0_pair", "must be finite");
      const Vector q = pair_or(q0_pair, 0.0, 2.0 * gap0);
      require(q(1) - q(0) - gap0 >= 0.0, "scenario.q0_pair", "initial gap q_2 - q_1 - gap0 is negative");
      break;
    }
    case ScenarioKind::ElasticBarChain:
      require(segments >= 1 && segments <= 100000, "scenario.segments", "must be in [1, 100000]");
      require(finite(total_mass) && total_mass > 0.0, "scenario.total_mass", "must be positive");
      require(finite(stiffness) && stiffness >= 0.0, "scenario.stiffness", "must be non-negative");
      require(finite(standoff) && standoff >= 0.0, "scenario.standoff", "must be non-negative");
      require(finite(chain_velocity), "scenario.chain_velocity", "must be finite");
      require(finite(damping_mass) && damping_mass >= 0.0, "scenario.damping_mass", "must be non-negative");
      require(finite(damping_stiffness) && damping_stiffness >= 0.0, "scenario.damping_stiffness",
              "must be non-negative");
      break;
    case ScenarioKind::ForcedOscillatorContact:
      require(finite(mass) && mass > 0.0, "scenario.mass", "must be positive");
      require(finite(spring) && spring > 0.0, "scenario.spring", "must be positive");
      require(finite(damping) && damping >= 0.0, "scenario.damping", "must be non-negative");
      require(finite(amplitude), "scenario.amplitude", "must be finite");
      require(finite(omega), "scenario.omega", "must be finite");
      require(finite(phase), "scenario.phase", "must be finite");
      require(finite(oscillator_standoff), "scenario.oscillator_standoff", "must be finite");
      require(finite(q0) && q0 + oscillator_standoff >= 0.0, "scenario.q0", "initial gap q0 + standoff is negative");
      require(finite(v0), "scenario.v0", "must be finite");
      break;
  }
}

Scenario build_scenario(const ScenarioSpec& spec) {
  spec.validate();
  ModelInput in;
  Vector q0;
  Vector v0;
  switch (spec.kind) {
    case ScenarioKind::BouncingBall:
      in.mass = scalar(spec.mass);
      in.contact_jacobian = scalar(1.0);
      in.gap_offset = Vector::Zero(1);
      in.forcing = ForcingTerm::constant(Vector::Constant(1, -spec.mass * spec.gravity));
      q0 = Vector::Constant(1, spec.q0);
      v0 = Vector::Constant(1, spec.v0);
      break;
    case ScenarioKind::TwoBallImpact:
      in.mass = Matrix::Zero(2, 2);
      in.mass(0, 0) = spec.mass1;
      in.mass(1, 1) = spec.mass2;
      in.contact_jacobian = Matrix(2, 1);
      in.contact_jacobian << -1.0, 1.0;
      in.gap_offset = Vector::Constant(1, -spec.gap0);
      in.forcing = ForcingTerm::zero(2);
      q0 = pair_or(spec.q0_pair, 0.0, 2.0 * spec.gap0);
      v0 = pair_or(spec.v0_pair, 1.0, 0.0);
      break;
    case ScenarioKind::ElasticBarChain: {
      const int n = spec.segments;
      in.mass = Matrix::Identity(n, n) * (spec.total_mass / n);
      in.stiffness = path_laplacian(n, spec.stiffness);
      in.damping = spec.damping_mass * in.mass + spec.damping_stiffness * in.stiffness;
      in.contact_jacobian = Matrix::Zero(n, 1);
      in.contact_jacobian(0, 0) = 1.0;
      in.gap_offset = Vector::Constant(1, spec.standoff);
      in.forcing = ForcingTerm::zero(n);
      q0 = Vector::Zero(n);
      v0 = Vector::Constant(n, spec.chain_velocity);
      break;
    }
    case ScenarioKind::ForcedOscillatorContact:
      in.mass = scalar(spec.mass);
      in.damping = scalar(spec.damping);
      in.stiffness = scalar(spec.spring);
      in.contact_jacobian = scalar(1.0);
      in.gap_offset = Vector::Constant(1, spec.oscillator_standoff);
      in.forcing = ForcingTerm::sinusoidal(Vector::Constant(1, spec.amplitude), spec.omega, spec.phase);
      q0 = Vector::Constant(1, spec.q0);
      v0 = Vector::Constant(1, spec.v0);
      break;
  }
  in.restitution = Vector::Constant(1, spec.restitution);
  LagrangianModel model = build_model(std::move(in));
  SystemState state = initial_state(model, q0, v0);
  return {std::move(model), std::move(state)};
}

std::pair<double, double> ball_first_impact(const ScenarioSpec& spec) {
  if (spec.kind != ScenarioKind::BouncingBall) {
    fail(ErrorCode::NotAvailable, "scenario.kind", "impact time is defined for the bouncing ball only");
  }
  const double g = spec.gravity;
  const double q0 = spec.q0;
  const double v0 = spec.v0;
  if (g == 0.0) {
    if (v0 >= 0.0) {
      fail(ErrorCode::NotAvailable, "scenario.v0", "the ball never reaches the floor");
    }
    return {q0 / -v0, -v0};
  }
  if (g < 0.0) {
    fail(ErrorCode::NotAvailable, "scenario.gravity", "the ball accelerates away from the floor");
  }
  const double speed = std::sqrt(v0 * v0 + 2.0 * g * q0);
  return {(v0 + speed) / g, speed};
}

std::pair<Vector, Vector> reference_solution(const ScenarioSpec& spec, double t) {
  spec.validate();
  switch (spec.kind) {
    case ScenarioKind::BouncingBall: return ball_reference(spec, t);
    case ScenarioKind::ForcedOscillatorContact: return oscillator_reference(spec, t);
    default: break;
  }
  fail(ErrorCode::NotAvailable, "scenario.kind",
       std::string("no closed-form reference for ") + std::string(to_string(spec.kind)));
}

}  // namespace nsc
