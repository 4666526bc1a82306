#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <doctest.h>

#include "nsc/commands.hpp"

using namespace nsc;
namespace fs = std::filesystem;

namespace {

using Table = std::vector<std::vector<std::string>>;

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

Table read_csv(const fs::path& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  Table rows;
  std::string line;
  while (std::getline(in, line)) rows.push_back(split(line));
  return rows;
}

std::size_t column(const Table& t, const std::string& name) {
  for (std::size_t i = 0; i < t.front().size(); ++i) {
    if (t.front()[i] == name) return i;
  }
  FAIL("missing column " << name);
  return 0;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

struct TempDir {
  fs::path path;
  TempDir() {
    static int counter = 0;
    path = fs::temp_directory_path() / ("nsc_cmd_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string write(const std::string& name, const std::string& text) const {
    std::ofstream(path / name) << text;
    return (path / name).string();
  }
  std::string out(const std::string& name) const { return (path / name).string(); }
};

const char* kBall =
    "scenario.kind = bouncing_ball\n"
    "scenario.restitution = 1\n"
    "scenario.q0 = 1\n"
    "scheme.variant = moreau_jean\n"
    "scheme.theta = 0.5\n"
    "run.h = 1e-3\n"
    "run.t_end = 1\n";

const char* kOscillator =
    "scenario.kind = forced_oscillator_contact\n"
    "scenario.mass = 1\n"
    "scenario.spring = 4\n"
    "scenario.damping = 0.1\n"
    "scenario.amplitude = 0.5\n"
    "scenario.omega = 1.3\n"
    "scenario.q0 = 0.1\n"
    "scenario.oscillator_standoff = 100\n"
    "run.t_end = 2\n";

const char* kHs = "1e-2,5e-3,2.5e-3,1.25e-3";

}  // namespace

TEST_CASE("format_double round trips at 17 digits") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int i = 0; i < 1000; ++i) {
    const double x = u(rng) * std::pow(10.0, (i % 40) - 20);
    CHECK(std::stod(format_double(x)) == x);
  }
  CHECK(format_double(0.5) == "0.5");
  CHECK(format_double(1.0) == "1");
  CHECK(format_double(std::nan("")) == "nan");
  CHECK(format_double(INFINITY) == "inf");
  CHECK(format_double(-INFINITY) == "-inf");
  CHECK(format_double(0.1).find(',') == std::string::npos);
}

TEST_CASE("fitted_order recovers an exact power law") {
  const std::vector<double> h{0.1, 0.05, 0.025, 0.0125};
  std::vector<double> e;
  for (double x : h) e.push_back(3.0 * x * x);
  CHECK(fitted_order(h, e) == doctest::Approx(2.0).epsilon(1e-12));
  e.clear();
  for (double x : h) e.push_back(0.7 * x);
  CHECK(fitted_order(h, e) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("grid specs") {
  Grid g = parse_grid("theta=0.5:1:6;e=0,0.5,1");
  REQUIRE(g.size() == 2);
  CHECK(g[0].first == "theta");
  REQUIRE(g[0].second.size() == 6);
  CHECK(g[0].second.front() == 0.5);
  CHECK(g[0].second.back() == 1.0);
  CHECK(g[0].second[1] == doctest::Approx(0.6));
  CHECK(g[1].second == std::vector<double>{0, 0.5, 1});
  CHECK(parse_grid("gamma=0.7").front().second == std::vector<double>{0.7});

  CHECK_THROWS_AS(parse_grid(""), Error);
  CHECK_THROWS_AS(parse_grid("omega=1"), Error);
  CHECK_THROWS_AS(parse_grid("theta=0.5;theta=0.6"), Error);
  CHECK_THROWS_AS(parse_grid("theta=0.5;e=0;gamma=1"), Error);
  CHECK_THROWS_AS(parse_grid("theta=a,b"), Error);
  CHECK_THROWS_AS(parse_grid("theta=0:1:0"), Error);
  CHECK_THROWS_AS(parse_grid("theta"), Error);

  CHECK(parse_list("1e-2, 5e-3", "h") == std::vector<double>{1e-2, 5e-3});
  CHECK_THROWS_AS(parse_list("1e-2,,5e-3", "h"), Error);
}

TEST_CASE("simulate writes both CSVs with the documented columns") {
  TempDir dir;
  const std::string cfg = dir.write("ball.cfg", kBall);
  std::ostringstream log;
  CHECK(cmd_simulate(cfg, dir.out("run"), false, log) == kExitOk);
  const Table traj = read_csv(dir.path / "run" / "trajectory.csv");
  const std::vector<std::string> header{"step", "t", "q_0", "v_0", "E", "H", "W_ext_cum", "W_damp_cum",
                                        "contact_work", "residual", "active_set", "penetration"};
  CHECK(traj.front() == header);
  CHECK(traj.size() == 1002);
  for (std::size_t i = 1; i < traj.size(); ++i) REQUIRE(traj[i].size() == header.size());
  CHECK(traj[1][0] == "0");
  CHECK(traj.back()[0] == "1000");

  const Table audit = read_csv(dir.path / "run" / "audit.csv");
  CHECK(audit.size() == 1001);
  const std::size_t ok = column(audit, "identity_ok");
  const std::size_t res = column(audit, "identity_residual");
  const std::size_t tol = column(audit, "identity_tolerance");
  for (std::size_t i = 1; i < audit.size(); ++i) {
    CHECK(audit[i][ok] == "true");
    CHECK(std::abs(std::stod(audit[i][res])) <= std::stod(audit[i][tol]));
  }
  // An impact shows up as an active contact in the trajectory.
  const std::size_t act = column(traj, "active_set");
  bool impact = false;
  for (std::size_t i = 1; i < traj.size(); ++i) impact = impact || traj[i][act] == "0";
  CHECK(impact);
}

TEST_CASE("multi-dof trajectory columns") {
  TempDir dir;
  const std::string cfg = dir.write("bar.cfg",
                                    "scenario.kind = elastic_bar_chain\nscenario.segments = 3\n"
                                    "scheme.variant = newmark\nrun.h = 1e-3\nrun.t_end = 0.01\n");
  std::ostringstream log;
  CHECK(cmd_simulate(cfg, dir.out("bar"), false, log) == kExitOk);
  const Table traj = read_csv(dir.path / "bar" / "trajectory.csv");
  const std::vector<std::string> head(traj.front().begin(), traj.front().begin() + 8);
  CHECK(head == std::vector<std::string>{"step", "t", "q_0", "q_1", "q_2", "v_0", "v_1", "v_2"});
}

TEST_CASE("theta = 0.4 runs but flags the condition") {
  TempDir dir;
  std::string text = kBall;
  text.replace(text.find("0.5\n"), 4, "0.4\n");
  const std::string cfg = dir.write("t04.cfg", text);
  std::ostringstream log;
  CHECK(cmd_simulate(cfg, dir.out("run"), false, log) == kExitOk);
  const Table audit = read_csv(dir.path / "run" / "audit.csv");
  const std::size_t c = column(audit, "condition_satisfied");
  for (std::size_t i = 1; i < audit.size(); ++i) CHECK(audit[i][c] == "false");
}

TEST_CASE("identity violations exit 2 and audit can be forced on") {
  TempDir dir;
  // A tolerance below roundoff turns every nonzero residual into a violation.
  const std::string cfg = dir.write("tight.cfg", std::string(kBall) + "tol.residual = 1e-300\nrun.audit = false\n");
  std::ostringstream log;
  CHECK(cmd_simulate(cfg, dir.out("off"), false, log) == kExitOk);
  CHECK_FALSE(fs::exists(dir.path / "off" / "audit.csv"));
  CHECK(cmd_simulate(cfg, dir.out("on"), true, log) == kExitAuditViolation);
  CHECK(fs::exists(dir.path / "on" / "audit.csv"));
}

TEST_CASE("schemes without an algorithmic energy fail the audit instead of passing silently") {
  TempDir dir;
  const std::string cfg = dir.write("kh.cfg",
                                    "scenario.kind = bouncing_ball\nscheme.variant = kh_generalized_alpha\n"
                                    "scheme.alpha_m = 0.5\nscheme.alpha_f = 0.4\nrun.t_end = 0.01\n");
  std::ostringstream log;
  CHECK(cmd_simulate(cfg, dir.out("run"), false, log) == kExitAuditViolation);
}

TEST_CASE("config and io errors exit 3") {
  TempDir dir;
  std::ostringstream log;
  CHECK(cmd_simulate(dir.write("bad.cfg", "scenario.kind = bouncing_ball\nrun.h = fast\n"), std::nullopt, false,
                     log) == kExitConfigError);
  CHECK(log.str().find(":2:") != std::string::npos);
  CHECK(cmd_simulate(dir.out("missing.cfg"), std::nullopt, false, log) == kExitConfigError);
  CHECK(cmd_sweep(dir.write("ok.cfg", kBall), "nope=1", std::nullopt, log) == kExitConfigError);
  CHECK(cmd_convergence(dir.write("osc.cfg", kOscillator), "1e-2,5e-3", std::nullopt, log) == kExitConfigError);
  CHECK(cmd_convergence(dir.path / "osc.cfg", "1e-2,-5e-3,1e-3", std::nullopt, log) == kExitConfigError);
}

TEST_CASE("run.output_dir is used when no directory is given") {
  TempDir dir;
  const std::string cfg =
      dir.write("ball.cfg", std::string(kBall) + "run.output_dir = " + dir.out("from_cfg") + "\n");
  std::ostringstream log;
  CHECK(cmd_simulate(cfg, std::nullopt, false, log) == kExitOk);
  CHECK(fs::exists(dir.path / "from_cfg" / "trajectory.csv"));
}

TEST_CASE("trajectory.csv is byte identical across runs") {
  TempDir dir;
  const std::string cfg = dir.write("ball.cfg", kBall);
  std::ostringstream log;
  REQUIRE(cmd_simulate(cfg, dir.out("a"), false, log) == kExitOk);
  REQUIRE(cmd_simulate(cfg, dir.out("b"), false, log) == kExitOk);
  CHECK(slurp(dir.path / "a" / "trajectory.csv") == slurp(dir.path / "b" / "trajectory.csv"));
  CHECK(slurp(dir.path / "a" / "audit.csv") == slurp(dir.path / "b" / "audit.csv"));
}

TEST_CASE("Moreau-Jean sweep dissipates inside the predicted region") {
  TempDir dir;
  const std::string cfg = dir.write("ball.cfg", kBall);
  std::ostringstream log;
  REQUIRE(cmd_sweep(cfg, "theta=0.5:1:6;e=0,0.5,1", dir.out("sw"), log) == kExitOk);
  const Table t = read_csv(dir.path / "sw" / "sweep.csv");
  REQUIRE(t.size() == 19);
  const std::size_t th = column(t, "theta");
  const std::size_t e = column(t, "e");
  const std::size_t cond = column(t, "condition_satisfied");
  const std::size_t frac = column(t, "dissipation_fraction");
  // Rows come out in grid order, the last parameter varying fastest.
  CHECK(t[1][th] == "0.5");
  CHECK(t[1][e] == "0");
  CHECK(t[2][e] == "0.5");
  for (std::size_t i = 1; i < t.size(); ++i) {
    const double theta = std::stod(t[i][th]);
    const double rest = std::stod(t[i][e]);
    const bool inside = theta * (1.0 + rest) <= 1.0 + 1e-12;
    CHECK(t[i][cond] == (inside ? "true" : "false"));
    if (inside) CHECK(std::stod(t[i][frac]) == 1.0);
  }
}

TEST_CASE("single-point sweep agrees with simulate") {
  TempDir dir;
  const std::string cfg = dir.write("ball.cfg", kBall);
  std::ostringstream log;
  REQUIRE(cmd_sweep(cfg, "theta=0.5", dir.out("sw"), log) == kExitOk);
  const RunOutput run = run_config(load_config(cfg));
  const AuditSummary s = summarize(run);
  const Table t = read_csv(dir.path / "sw" / "sweep.csv");
  REQUIRE(t.size() == 2);
  CHECK(std::stoul(t[1][column(t, "steps")]) == s.steps);
  CHECK(t[1][column(t, "condition_satisfied")] == (s.condition_satisfied ? "true" : "false"));
  CHECK(std::stod(t[1][column(t, "dissipation_fraction")]) ==
        static_cast<double>(s.dissipative_steps) / static_cast<double>(s.steps));
  CHECK(t[1][column(t, "max_energy_gain")] == format_double(s.max_energy_gain));
  CHECK(std::stoul(t[1][column(t, "identity_violations")]) == 0);
}

TEST_CASE("Newmark with 2 beta = gamma dissipates for every gamma >= 1/2") {
  TempDir dir;
  const std::string cfg = dir.write("nm.cfg",
                                    "scenario.kind = elastic_bar_chain\nscenario.segments = 6\n"
                                    "scenario.standoff = 0.002\nscheme.variant = newmark\n"
                                    "run.h = 2e-4\nrun.t_end = 0.05\n");
  std::ostringstream log;
  REQUIRE(cmd_sweep(cfg, "gamma_tied=0.5:1:6", dir.out("sw"), log) == kExitOk);
  const Table t = read_csv(dir.path / "sw" / "sweep.csv");
  REQUIRE(t.size() == 7);
  for (std::size_t i = 1; i < t.size(); ++i) {
    CHECK(t[i][column(t, "condition_satisfied")] == "true");
    CHECK(std::stod(t[i][column(t, "dissipation_fraction")]) == 1.0);
  }
}

TEST_CASE("sweep reports bad grid values as config errors") {
  TempDir dir;
  const std::string cfg = dir.write("ball.cfg", kBall);
  std::ostringstream log;
  CHECK(cmd_sweep(cfg, "theta=0.5,1.5", dir.out("sw"), log) == kExitConfigError);
  const Table t = read_csv(dir.path / "sw" / "sweep.csv");
  REQUIRE(t.size() == 3);
  CHECK(t[1].back() == "ok");
  CHECK(t[2].back() != "ok");
}

TEST_CASE("convergence orders on the smooth oscillator") {
  TempDir dir;
  std::ostringstream log;
  auto order = [&](const std::string& scheme) {
    const std::string cfg = dir.write("osc.cfg", std::string(kOscillator) + scheme);
    REQUIRE(cmd_convergence(cfg, kHs, dir.out("cv"), log) == kExitOk);
    const Table t = read_csv(dir.path / "cv" / "convergence.csv");
    REQUIRE(t.size() == 5);
    CHECK(t.front() ==
          std::vector<std::string>{"h", "steps", "t_final", "error_q", "error_v", "error", "fitted_order"});
    return std::stod(t[1].back());
  };
  CHECK(order("scheme.variant = generalized_alpha\nscheme.rho_inf = 0.8\n") >= 1.9);
  CHECK(order("scheme.variant = moreau_jean\nscheme.theta = 0.5\n") >= 1.9);
  CHECK(order("scheme.variant = moreau_jean\nscheme.theta = 1\n") == doctest::Approx(1.0).epsilon(0.15));
  CHECK(order("scheme.variant = hht\nscheme.alpha = 0.1\n") >= 1.9);
}

TEST_CASE("convergence needs a reference and a contact-free run") {
  TempDir dir;
  std::ostringstream log;
  CHECK(cmd_convergence(dir.write("bar.cfg", "scenario.kind = elastic_bar_chain\n"), kHs, dir.out("cv"), log) ==
        kExitSolverFailure);
  CHECK(cmd_convergence(dir.write("ball.cfg", kBall), kHs, dir.out("cv"), log) == kExitSolverFailure);
}
