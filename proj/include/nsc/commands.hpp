#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "nsc/config.hpp"

namespace nsc {

enum ExitCode : int { kExitOk = 0, kExitSolverFailure = 1, kExitAuditViolation = 2, kExitConfigError = 3 };

struct RunOutput {
  RunConfig config;
  SchemeSpec scheme;
  Scenario scenario;
  Trajectory trajectory;
};

RunOutput run_config(const RunConfig& config);

struct AuditSummary {
  std::size_t steps = 0;
  std::size_t violations = 0;            // steps whose identity residual exceeds tolerance
  std::size_t dissipative_steps = 0;     // steps with dissipation_satisfied
  bool condition_satisfied = false;
  double max_residual_ratio = 0.0;       // max |residual| / tolerance
  double max_energy_gain = 0.0;          // max(0, (dE or dH) - W_ext - W_damping)
};

AuditSummary summarize(const RunOutput& run);

/// Shortest round-trip form with 17 significant digits, locale independent.
std::string format_double(double x);

void write_trajectory_csv(const RunOutput& run, std::ostream& out);
void write_audit_csv(const RunOutput& run, std::ostream& out);

/// `name=v1,v2;name=lo:hi:n`. Names: theta, gamma, beta, alpha, alpha_m,
/// alpha_f, rho_inf, e (or restitution), gamma_tied (gamma with beta = gamma/2).
using Grid = std::vector<std::pair<std::string, std::vector<double>>>;
Grid parse_grid(std::string_view spec);

/// Parses `1e-2,5e-3,...`.
std::vector<double> parse_list(std::string_view spec, std::string_view field);

/// Least-squares slope of log(error) against log(h).
double fitted_order(const std::vector<double>& h, const std::vector<double>& error);

int cmd_simulate(const std::string& config_path, const std::optional<std::string>& out_dir, bool force_audit,
                 std::ostream& log);
int cmd_sweep(const std::string& config_path, const std::string& grid, const std::optional<std::string>& out_dir,
              std::ostream& log);
int cmd_convergence(const std::string& config_path, const std::string& h_list,
                    const std::optional<std::string>& out_dir, std::ostream& log);

}  // namespace nsc
