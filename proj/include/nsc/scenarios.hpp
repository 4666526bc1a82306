#pragma once

#include <optional>
#include <string_view>
#include <utility>

#include "nsc/model.hpp"

namespace nsc {

enum class ScenarioKind { BouncingBall, TwoBallImpact, ElasticBarChain, ForcedOscillatorContact };

std::string_view to_string(ScenarioKind kind);
ScenarioKind parse_scenario_kind(std::string_view name);

struct ScenarioSpec {
  ScenarioKind kind = ScenarioKind::BouncingBall;
  double restitution = 1.0;

  // bouncing_ball, forced_oscillator_contact
  double mass = 1.0;
  double gravity = 9.81;
  double q0 = 1.0;
  double v0 = 0.0;

  // two_ball_impact: g = q_2 - q_1 - gap0, default q = (0, 2 gap0)
  double mass1 = 1.0;
  double mass2 = 1.0;
  double gap0 = 1.0;
  Vector q0_pair;
  Vector v0_pair;

  // elastic_bar_chain: node 0 faces a wall at distance standoff
  int segments = 10;
  double total_mass = 1.0;
  double stiffness = 1000.0;
  double standoff = 0.0;
  double chain_velocity = -1.0;
  double damping_mass = 0.0;       // Rayleigh C = damping_mass M + damping_stiffness K
  double damping_stiffness = 0.0;

  // forced_oscillator_contact: m q'' + c q' + k q = A sin(omega t + phase), gap q + standoff
  double spring = 100.0;
  double damping = 0.0;
  double amplitude = 1.0;
  double omega = 3.0;
  double phase = 0.0;
  double oscillator_standoff = 10.0;

  void validate() const;
};

struct Scenario {
  LagrangianModel model;
  SystemState state;
};

Scenario build_scenario(const ScenarioSpec& spec);

/// Closed-form (q, v) at time t: bouncing ball with e = 1 and the forced
/// oscillator before any contact. Throws NotAvailable otherwise.
std::pair<Vector, Vector> reference_solution(const ScenarioSpec& spec, double t);

/// First impact time and speed of the ball released from (q0, v0).
std::pair<double, double> ball_first_impact(const ScenarioSpec& spec);

}  // namespace nsc
