// Acceptance checks: one PASS/FAIL line per criterion, exit status 1 if any fails.
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "nsc/commands.hpp"
#include "nsc/energy.hpp"
#include "nsc/lcp.hpp"

using namespace nsc;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

Scenario ball(double e, double q0 = 1.0, double v0 = 0.0) {
  ScenarioSpec s;
  s.restitution = e;
  s.q0 = q0;
  s.v0 = v0;
  return build_scenario(s);
}

ScenarioSpec bar_spec(double e, double damping) {
  ScenarioSpec s;
  s.kind = ScenarioKind::ElasticBarChain;
  s.segments = 10;
  s.restitution = e;
  s.standoff = 0.01;
  s.damping_mass = damping;
  s.damping_stiffness = damping * 1e-3;
  return s;
}

Scenario bar(double e, double damping) { return build_scenario(bar_spec(e, damping)); }

int impact_steps(const Trajectory& tr) {
  int n = 0;
  for (const StepRecord& r : tr.records) n += r.P.size() > 0 && r.P.maxCoeff() > 0.0;
  return n;
}

// Largest |identity residual| / (1 + scale) over a run.
double worst_identity(const Trajectory& tr) {
  double worst = 0.0;
  for (const StepRecord& r : tr.records) {
    const double rel = std::abs(r.identity_residual) / (1.0 + r.identity_scale);
    worst = std::isnan(rel) ? INFINITY : std::max(worst, rel);
  }
  return worst;
}

// Largest positive (dE or dH) - W_ext - W_damping relative to the step's scale.
double worst_gain(const Trajectory& tr) {
  double worst = -INFINITY;
  for (const StepRecord& r : tr.records) worst = std::max(worst, r.dissipation / (1.0 + r.identity_scale));
  return worst;
}

Outcome moreau_jean_identity() {
  Outcome o;
  double worst = 0.0;
  int impacts = 0;
  for (double theta : {0.5, 0.7, 1.0}) {
    const SchemeSpec s = SchemeSpec::moreau_jean(theta);
    const Scenario b = ball(0.8);
    const Trajectory tb = simulate(b.model, b.state, 1e-3, s, 2.0);
    const Scenario c = bar(0.5, 0.2);
    const Trajectory tc = simulate(c.model, c.state, 1e-4, s, 0.5);
    o.pass = o.pass && tb.records.size() == 2000 && tc.records.size() == 5000;
    worst = std::max({worst, worst_identity(tb), worst_identity(tc)});
    impacts += impact_steps(tb) + impact_steps(tc);
  }
  o.pass = o.pass && worst <= 1e-10 && impacts > 0;
  o.detail = fmt("worst residual/(1+scale) %.2e, %g impact steps", worst, impacts);
  return o;
}

Outcome moreau_jean_region() {
  Outcome o;
  double worst = -INFINITY;
  int inside = 0;
  for (double theta : {0.5, 0.6, 0.7, 0.8, 0.9, 1.0}) {
    for (double e : {0.0, 0.5, 1.0}) {
      if (theta > 1.0 / (1.0 + e) + 1e-12) continue;
      ++inside;
      const Scenario b = ball(e);
      const Trajectory tr = simulate(b.model, b.state, 1e-3, SchemeSpec::moreau_jean(theta), 2.0);
      o.pass = o.pass && energy::dissipation_condition(b.model, SchemeSpec::moreau_jean(theta));
      for (std::size_t k = 0; k < tr.records.size(); ++k) {
        const StepRecord& r = tr.records[k];
        const double gain = r.dissipation;
        const double scale = std::max(r.identity_scale, 1e-300);
        o.pass = o.pass && gain <= 1e-10 * scale;
        worst = std::max(worst, gain / scale);
      }
    }
  }
  o.detail = fmt("%g grid points inside the region, worst gain/scale %.2e", inside, worst);
  return o;
}

Outcome elastic_conservation() {
  Outcome o;
  const Scenario b = ball(1.0, 0.1);
  const Trajectory tr = simulate(b.model, b.state, 1e-3, SchemeSpec::moreau_jean(0.5), 6.5);
  int impacts = 0;
  bool in_contact = false;
  double worst = -INFINITY;
  double w_ext = 0.0;
  double e_scale = 0.0;
  for (std::size_t k = 0; k < tr.records.size(); ++k) {
    const StepRecord& r = tr.records[k];
    const bool active = r.P.maxCoeff() > 0.0;
    impacts += active && !in_contact;
    in_contact = active;
    const double gain = energy::energy_increment(b.model, tr.states[k], tr.states[k + 1]) - r.W_ext;
    const double scale = std::max(r.identity_scale, 1e-300);
    o.pass = o.pass && gain <= 1e-10 * scale;
    worst = std::max(worst, gain / scale);
    w_ext += r.W_ext;
    e_scale = std::max({e_scale, r.E_prev, r.E_next});
  }
  const double drift = std::abs(tr.records.back().E_next - tr.records.front().E_prev - w_ext);
  o.pass = o.pass && impacts >= 20 && drift <= 1e-8 * e_scale;
  o.detail = fmt("%g impacts, worst step gain/scale %.2e, drift/E-scale %.2e", impacts, worst, drift / e_scale);
  return o;
}

Outcome contact_work_sign() {
  Outcome o;
  std::mt19937 rng(2024);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = -INFINITY;
  int steps_with_impulse = 0;
  for (int trial = 0; trial < 100; ++trial) {
    ScenarioSpec spec;
    spec.restitution = u(rng);
    switch (trial % 4) {
      case 0:
        spec.q0 = 0.05 + 0.5 * u(rng);
        spec.v0 = u(rng) - 0.5;
        break;
      case 1:
        spec = bar_spec(spec.restitution, 0.5 * u(rng));
        spec.segments = 2 + trial % 7;
        spec.standoff = 0.005 * u(rng);
        break;
      case 2:
        spec.kind = ScenarioKind::TwoBallImpact;
        spec.mass1 = 0.5 + u(rng);
        spec.mass2 = 0.5 + u(rng);
        spec.gap0 = 0.02 + 0.05 * u(rng);
        break;
      default:
        spec.kind = ScenarioKind::ForcedOscillatorContact;
        spec.spring = 10.0 + 100.0 * u(rng);
        spec.damping = u(rng);
        spec.amplitude = 5.0 + 5.0 * u(rng);
        spec.oscillator_standoff = 0.02 + 0.05 * u(rng);
        spec.q0 = 0.0;
        break;
    }
    const Scenario sc = build_scenario(spec);
    SchemeSpec s;
    switch ((trial / 4) % 4) {
      case 0: {
        const double gamma = 0.5 + 0.5 * u(rng);
        s = SchemeSpec::newmark(gamma, 0.5 * gamma + 0.2 * u(rng));
        break;
      }
      case 1: s = SchemeSpec::hht(u(rng) / 3.0); break;
      case 2: s = SchemeSpec::generalized_alpha_from_rho(u(rng)); break;
      default: s = SchemeSpec::kh_generalized_alpha_from_rho(u(rng)); break;
    }
    const Trajectory tr = simulate(sc.model, sc.state, 1e-3, s, 0.5, AuditFlags{false});
    for (const StepRecord& r : tr.records) {
      const double work = (0.5 * (r.U_prev + r.U_next)).dot(r.P);
      const double scale = r.P.lpNorm<Eigen::Infinity>() *
                           (r.U_prev.lpNorm<Eigen::Infinity>() + r.U_next.lpNorm<Eigen::Infinity>());
      if (r.P.maxCoeff() > 0.0) ++steps_with_impulse;
      o.pass = o.pass && work <= 1e-12 * scale;
      if (scale > 0.0) worst = std::max(worst, work / scale);
    }
  }
  o.pass = o.pass && steps_with_impulse > 0;
  o.detail = fmt("100 runs, %g steps with impulse, worst work/scale %.2e", steps_with_impulse, worst);
  return o;
}

Outcome newmark() {
  Outcome o;
  double worst = 0.0;
  double gain = -INFINITY;
  for (double gamma : {0.5, 0.6, 0.75, 1.0}) {
    for (double beta : {0.5 * gamma, 0.25 * (gamma + 0.5) * (gamma + 0.5), 0.6}) {
      const SchemeSpec s = SchemeSpec::newmark(gamma, beta);
      for (const Scenario& sc : {bar(0.5, 0.2), ball(0.7)}) {
        const Trajectory tr = simulate(sc.model, sc.state, 1e-3, s, 1.0);
        worst = std::max(worst, worst_identity(tr));
        gain = std::max(gain, worst_gain(tr));
        for (const StepRecord& r : tr.records) o.pass = o.pass && r.dissipation_satisfied;
      }
    }
  }
  double balance = 0.0;
  const Scenario sc = bar(0.6, 0.0);
  const Trajectory tr = simulate(sc.model, sc.state, 1e-3, SchemeSpec::newmark(0.5, 0.25), 1.0);
  for (std::size_t k = 0; k < tr.records.size(); ++k) {
    const StepRecord& r = tr.records[k];
    const double lhs = energy::energy_increment(sc.model, tr.states[k], tr.states[k + 1]) - r.W_ext - r.W_damping;
    const double rhs = (0.5 * (r.U_prev + r.U_next)).dot(r.P);
    balance = std::max(balance, std::abs(lhs - rhs) / (1.0 + r.identity_scale));
  }
  o.pass = o.pass && worst <= 1e-10 && gain <= 1e-10 && balance <= 1e-10 && impact_steps(tr) > 0;
  o.detail = fmt("identity %.2e, worst gain %.2e, trapezoidal balance %.2e", worst, gain, balance);
  return o;
}

Outcome hht() {
  Outcome o;
  double worst = 0.0;
  double gain = -INFINITY;
  int cases = 0;
  for (double alpha : {0.0, 0.1, 0.2, 1.0 / 3.0}) {
    for (double dg : {0.0, 0.1, 0.2}) {
      const double gamma = 0.5 + alpha + dg;
      if (gamma - 0.5 > 0.5) continue;
      for (double beta : {0.5 * gamma, 0.25 * (gamma + 0.5) * (gamma + 0.5)}) {
        const SchemeSpec s = SchemeSpec::hht(alpha, gamma, beta);
        ++cases;
        for (const Scenario& sc : {bar(0.3, 0.3), ball(0.5)}) {
          o.pass = o.pass && energy::dissipation_condition(sc.model, s);
          const Trajectory tr = simulate(sc.model, sc.state, 1e-3, s, 1.0);
          worst = std::max(worst, worst_identity(tr));
          gain = std::max(gain, worst_gain(tr));
          for (const StepRecord& r : tr.records) o.pass = o.pass && r.dissipation_satisfied;
        }
      }
    }
  }
  o.pass = o.pass && worst <= 1e-10 && gain <= 1e-10;
  o.detail = fmt("%g parameter sets, identity %.2e, worst gain %.2e", cases, worst, gain);
  return o;
}

Outcome kh() {
  Outcome o;
  double worst = 0.0;
  double gain = -INFINITY;
  for (double rho : {0.0, 0.3, 0.6, 0.9, 1.0}) {
    const SchemeSpec s = SchemeSpec::kh_generalized_alpha_from_rho(rho);
    for (const Scenario& sc : {bar(0.3, 0.3), ball(0.5)}) {
      o.pass = o.pass && energy::dissipation_condition(sc.model, s);
      const Trajectory tr = simulate(sc.model, sc.state, 1e-3, s, 1.0);
      worst = std::max(worst, worst_identity(tr));
      gain = std::max(gain, worst_gain(tr));
      for (const StepRecord& r : tr.records) o.pass = o.pass && r.dissipation_satisfied;
    }
  }
  double diff = 0.0;
  for (double rho : {0.2, 0.7}) {
    for (const Scenario& sc : {bar(0.5, 0.0), ball(0.6)}) {
      const Trajectory a = simulate(sc.model, sc.state, 1e-3, SchemeSpec::kh_generalized_alpha_from_rho(rho), 1.0);
      const Trajectory b = simulate(sc.model, sc.state, 1e-3, SchemeSpec::generalized_alpha_from_rho(rho), 1.0);
      for (std::size_t k = 0; k < a.states.size(); ++k) {
        diff = std::max({diff, (a.states[k].q - b.states[k].q).lpNorm<Eigen::Infinity>(),
                         (a.states[k].v - b.states[k].v).lpNorm<Eigen::Infinity>()});
      }
    }
  }
  o.pass = o.pass && worst <= 1e-10 && gain <= 1e-10 && diff <= 1e-12;
  o.detail = fmt("identity %.2e, worst gain %.2e, max |KH - GA| %.2e", worst, gain, diff);
  return o;
}

Outcome lcp_oracle() {
  Outcome o;
  std::mt19937 rng(99);
  std::normal_distribution<double> n01;
  std::uniform_int_distribution<int> size(1, 8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double max_diff = 0.0;
  double max_res = 0.0;
  int unique = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const int s = size(rng);
    const int rank = trial % 3 == 0 ? std::max(1, s - 1 - trial % 2) : s;
    Matrix A(rank, s);
    for (int i = 0; i < rank; ++i)
      for (int j = 0; j < s; ++j) A(i, j) = n01(rng);
    lcp::LcpProblem p;
    p.W = A.transpose() * A;
    // A complementary pair (z*, w*) fixes b so every problem is solvable.
    Vector z = Vector::Zero(s);
    Vector w = Vector::Zero(s);
    for (int i = 0; i < s; ++i) (u(rng) < 0.5 ? z(i) : w(i)) = u(rng) + 0.1;
    p.b = w - p.W * z;
    const lcp::LcpSolution a = lcp::solve_lemke(p);
    const lcp::LcpSolution b = lcp::solve_enumeration(p);
    o.pass = o.pass && a.status == lcp::LcpStatus::Solved && b.status == lcp::LcpStatus::Solved;
    max_res = std::max({max_res, a.residual, b.residual});
    const bool pd = Eigen::SelfAdjointEigenSolver<Matrix>(p.W).eigenvalues().minCoeff() > 1e-8;
    if (pd) {
      ++unique;
      max_diff = std::max(max_diff, (a.z - b.z).lpNorm<Eigen::Infinity>());
    }
  }
  o.pass = o.pass && max_diff <= 1e-9 && max_res <= 1e-10;
  o.detail = fmt("500 problems, %g unique, max |z_lemke - z_enum| %.2e, max residual %.2e", unique, max_diff, max_res);
  return o;
}

double oscillator_order(const SchemeSpec& s) {
  ScenarioSpec spec;
  spec.kind = ScenarioKind::ForcedOscillatorContact;
  spec.spring = 4.0;
  spec.damping = 0.1;
  spec.amplitude = 0.5;
  spec.omega = 1.3;
  spec.q0 = 0.1;
  spec.oscillator_standoff = 100.0;
  const Scenario sc = build_scenario(spec);
  const std::vector<double> hs{1e-2, 5e-3, 2.5e-3, 1.25e-3};
  std::vector<double> err;
  for (double h : hs) {
    const Trajectory tr = simulate(sc.model, sc.state, h, s, 2.0, AuditFlags{false});
    const SystemState& end = tr.states.back();
    const auto [q, v] = reference_solution(spec, end.t);
    err.push_back(std::max((end.q - q).lpNorm<Eigen::Infinity>(), (end.v - v).lpNorm<Eigen::Infinity>()));
  }
  return fitted_order(hs, err);
}

Outcome convergence_orders() {
  const double trap = oscillator_order(SchemeSpec::moreau_jean(0.5));
  const double ga = oscillator_order(SchemeSpec::generalized_alpha_from_rho(0.8));
  const double euler = oscillator_order(SchemeSpec::moreau_jean(1.0));
  Outcome o;
  o.pass = trap >= 1.9 && ga >= 1.9 && std::abs(euler - 1.0) <= 0.15;
  o.detail = fmt("theta=1/2 %.3f, generalized-alpha %.3f, theta=1 %.3f", trap, ga, euler);
  return o;
}

double max_penetration(double h) {
  // Ball in contact with a closing velocity, inelastic, trapezoidal weight.
  const Scenario b = ball(0.0, 0.0, -1.0);
  const Trajectory tr = simulate(b.model, b.state, h, SchemeSpec::moreau_jean(0.5), 0.5, AuditFlags{false});
  double pen = 0.0;
  for (const StepRecord& r : tr.records) pen = std::max(pen, r.penetration);
  return pen;
}

Outcome penetration_scaling() {
  const double a = max_penetration(1e-3);
  const double b = max_penetration(5e-4);
  Outcome o;
  const double ratio = a / b;
  o.pass = b > 0.0 && ratio >= 1.6 && ratio <= 2.4;
  o.detail = fmt("max penetration %.3e at h, %.3e at h/2, ratio %.3f", a, b, ratio);
  return o;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

Outcome determinism() {
  const fs::path dir = fs::temp_directory_path() / ("nsc_acceptance_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  {
    std::ofstream cfg(dir / "bar.cfg");
    cfg << "scenario.kind = elastic_bar_chain\nscenario.restitution = 0.5\nscenario.standoff = 0.01\n"
           "scheme.variant = generalized_alpha\nscheme.rho_inf = 0.6\nrun.h = 1e-4\nrun.t_end = 0.2\n";
  }
  std::ostringstream log;
  const int a = cmd_simulate((dir / "bar.cfg").string(), (dir / "a").string(), false, log);
  const int b = cmd_simulate((dir / "bar.cfg").string(), (dir / "b").string(), false, log);
  const std::string ta = slurp(dir / "a" / "trajectory.csv");
  const std::string tb = slurp(dir / "b" / "trajectory.csv");
  fs::remove_all(dir);
  Outcome o;
  o.pass = a == kExitOk && b == kExitOk && !ta.empty() && ta == tb;
  o.detail = fmt("two runs, %g bytes each, identical", static_cast<double>(ta.size()));
  if (!o.pass) o.detail = "trajectory.csv differs or a run failed";
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"moreau-jean energy identity (ball, 10-dof bar, theta 0.5/0.7/1)", moreau_jean_identity},
      {"moreau-jean dissipation region (6x3 grid)", moreau_jean_region},
      {"elastic ball conservation (>= 20 impacts)", elastic_conservation},
      {"contact work sign for the alpha family (100 random runs)", contact_work_sign},
      {"nonsmooth newmark identity and dissipation", newmark},
      {"nonsmooth HHT identity and dissipation", hht},
      {"nonsmooth KH-alpha identity, dissipation, generalized-alpha match", kh},
      {"LCP Lemke vs enumeration (500 random PSD problems)", lcp_oracle},
      {"convergence orders on the smooth oscillator", convergence_orders},
      {"penetration scales with the step size", penetration_scaling},
      {"byte-identical trajectory.csv", determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("%s %2zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
