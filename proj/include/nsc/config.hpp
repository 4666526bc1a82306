#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "nsc/integrators.hpp"
#include "nsc/scenarios.hpp"

namespace nsc {

/// Scheme keys as written in a config. Unset fields fall back to the
/// variant's usual defaults when resolved.
struct SchemeSettings {
  SchemeVariant variant = SchemeVariant::MoreauJean;
  std::optional<double> theta;
  std::optional<double> gamma;
  std::optional<double> beta;
  std::optional<double> alpha_m;
  std::optional<double> alpha_f;
  std::optional<double> alpha;
  std::optional<double> rho_inf;

  SchemeSpec resolve() const;
};

struct RunConfig {
  ScenarioSpec scenario;
  SchemeSettings scheme;
  double h = 1e-3;
  double t_end = 1.0;
  std::string output_dir = ".";
  bool audit = true;
  LcpMethod lcp_method = LcpMethod::Lemke;
  double residual_tol = 1e-10;
  double lcp_tol = lcp::kDefaultTol;
  bool residual_tol_set = false;

  SchemeSpec scheme_spec() const { return scheme.resolve(); }
  /// Throws ConfigParse naming the field when a value is out of range.
  void validate() const;
};

/// Applies one `key = value` setting. Throws ConfigParse for unknown keys or
/// unparsable values.
void apply_setting(RunConfig& config, std::string_view key, std::string_view value);

/// Flat text format: one `dotted.key = value` per line, `#` starts a comment.
/// Diagnostics carry `source:line`.
RunConfig parse_config(std::string_view text, std::string_view source = "<config>");
RunConfig load_config(const std::string& path);

/// NSC_TOL replaces the default residual tolerance unless the config sets tol.residual.
void apply_environment(RunConfig& config);

double parse_double(std::string_view text, std::string_view field);

}  // namespace nsc
