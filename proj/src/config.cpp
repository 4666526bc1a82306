#include "nsc/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <set>
#include <vector>

namespace nsc {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) {
    return {};
  }
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void bad_value(std::string_view field, std::string_view value, const std::string& why) {
  fail(ErrorCode::ConfigParse, std::string(field), "invalid value '" + std::string(value) + "': " + why);
}

int parse_int(std::string_view text, std::string_view field) {
  int out = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    bad_value(field, text, "expected an integer");
  }
  return out;
}

bool parse_bool(std::string_view text, std::string_view field) {
  if (text == "true" || text == "1" || text == "yes" || text == "on") {
    return true;
  }
  if (text == "false" || text == "0" || text == "no" || text == "off") {
    return false;
  }
  bad_value(field, text, "expected true or false");
}

Vector parse_vector(std::string_view text, std::string_view field) {
  std::vector<double> values;
  while (!text.empty()) {
    const auto comma = text.find(',');
    values.push_back(parse_double(trim(text.substr(0, comma)), field));
    if (comma == std::string_view::npos) {
      break;
    }
    text.remove_prefix(comma + 1);
  }
  Vector out(static_cast<Eigen::Index>(values.size()));
  for (std::size_t i = 0; i < values.size(); ++i) {
    out(static_cast<Eigen::Index>(i)) = values[i];
  }
  return out;
}

std::string unquote(std::string_view v) {
  if (v.size() >= 2 && v.front() == '"' && v.back() == '"') {
    return std::string(v.substr(1, v.size() - 2));
  }
  return std::string(v);
}

// Strip a trailing comment unless the # sits inside double quotes.
std::string_view strip_comment(std::string_view line) {
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') {
      quoted = !quoted;
    } else if (line[i] == '#' && !quoted) {
      return line.substr(0, i);
    }
  }
  return line;
}

}  // namespace

double parse_double(std::string_view text, std::string_view field) {
  double out = 0.0;
  if (!text.empty() && text.front() == '+') {
    text.remove_prefix(1);
  }
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(out)) {
    bad_value(field, text, "expected a finite number");
  }
  return out;
}

SchemeSpec SchemeSettings::resolve() const {
  switch (variant) {
    case SchemeVariant::MoreauJean: return SchemeSpec::moreau_jean(theta.value_or(0.5));
    case SchemeVariant::MoreauJeanVariant: return SchemeSpec::moreau_jean_variant(theta.value_or(0.5));
    case SchemeVariant::NonsmoothNewmark: {
      const double g = gamma.value_or(0.5);
      return SchemeSpec::newmark(g, beta.value_or(0.25 * (g + 0.5) * (g + 0.5)));
    }
    case SchemeVariant::NonsmoothHHT: {
      const double a = alpha.value_or(alpha_f.value_or(0.0));
      SchemeSpec s = SchemeSpec::hht(a);
      s.gamma = gamma.value_or(s.gamma);
      s.beta = beta.value_or(s.beta);
      return s;
    }
    case SchemeVariant::NonsmoothGeneralizedAlpha:
    case SchemeVariant::NonsmoothKHGeneralizedAlpha: {
      const bool kh = variant == SchemeVariant::NonsmoothKHGeneralizedAlpha;
      const double rho = rho_inf.value_or(1.0);
      SchemeSpec s = kh ? SchemeSpec::kh_generalized_alpha_from_rho(rho) : SchemeSpec::generalized_alpha_from_rho(rho);
      const auto second_order_beta = [](double g) { return 0.25 * (g + 0.5) * (g + 0.5); };
      if (alpha_m || alpha_f) {
        s.alpha_m = alpha_m.value_or(rho_inf ? s.alpha_m : 0.0);
        s.alpha_f = alpha_f.value_or(rho_inf ? s.alpha_f : 0.0);
        s.gamma = 0.5 + s.alpha_f - s.alpha_m;
        s.beta = second_order_beta(s.gamma);
      }
      if (gamma) {
        s.gamma = *gamma;
        s.beta = second_order_beta(s.gamma);
      }
      s.beta = beta.value_or(s.beta);
      return s;
    }
  }
  return {};
}

void RunConfig::validate() const {
  auto wrap = [](auto&& f) {
    try {
      f();
    } catch (const Error& e) {
      if (e.code() == ErrorCode::ConfigParse) {
        throw;
      }
      throw Error(ErrorCode::ConfigParse, e.field(), e.what());
    }
  };
  if (!(h > 0.0)) {
    fail(ErrorCode::ConfigParse, "run.h", "step size must be positive");
  }
  if (!(t_end > 0.0)) {
    fail(ErrorCode::ConfigParse, "run.t_end", "horizon must be positive");
  }
  if (!(residual_tol > 0.0)) {
    fail(ErrorCode::ConfigParse, "tol.residual", "tolerance must be positive");
  }
  if (!(lcp_tol > 0.0)) {
    fail(ErrorCode::ConfigParse, "tol.lcp", "tolerance must be positive");
  }
  wrap([&] { scenario.validate(); });
  wrap([&] { scheme_spec().validate(); });
}

void apply_setting(RunConfig& c, std::string_view key, std::string_view raw) {
  const std::string value = unquote(trim(raw));
  const std::string_view v = value;
  ScenarioSpec& s = c.scenario;
  SchemeSettings& k = c.scheme;
  auto num = [&] { return parse_double(v, key); };

  if (key == "scenario.kind") {
    try {
      s.kind = parse_scenario_kind(v);
    } catch (const Error&) {
      bad_value(key, v, "expected bouncing_ball, two_ball_impact, elastic_bar_chain or forced_oscillator_contact");
    }
  } else if (key == "scenario.restitution") {
    s.restitution = num();
  } else if (key == "scenario.mass") {
    s.mass = num();
  } else if (key == "scenario.gravity") {
    s.gravity = num();
  } else if (key == "scenario.q0") {
    s.q0 = num();
  } else if (key == "scenario.v0") {
    s.v0 = num();
  } else if (key == "scenario.mass1") {
    s.mass1 = num();
  } else if (key == "scenario.mass2") {
    s.mass2 = num();
  } else if (key == "scenario.gap0") {
    s.gap0 = num();
  } else if (key == "scenario.q0_pair") {
    s.q0_pair = parse_vector(v, key);
  } else if (key == "scenario.v0_pair") {
    s.v0_pair = parse_vector(v, key);
  } else if (key == "scenario.segments") {
    s.segments = parse_int(v, key);
  } else if (key == "scenario.total_mass") {
    s.total_mass = num();
  } else if (key == "scenario.stiffness") {
    s.stiffness = num();
  } else if (key == "scenario.standoff") {
    s.standoff = num();
  } else if (key == "scenario.chain_velocity") {
    s.chain_velocity = num();
  } else if (key == "scenario.damping_mass") {
    s.damping_mass = num();
  } else if (key == "scenario.damping_stiffness") {
    s.damping_stiffness = num();
  } else if (key == "scenario.spring") {
    s.spring = num();
  } else if (key == "scenario.damping") {
    s.damping = num();
  } else if (key == "scenario.amplitude") {
    s.amplitude = num();
  } else if (key == "scenario.omega") {
    s.omega = num();
  } else if (key == "scenario.phase") {
    s.phase = num();
  } else if (key == "scenario.oscillator_standoff") {
    s.oscillator_standoff = num();
  } else if (key == "scheme.variant") {
    try {
      k.variant = parse_variant(v);
    } catch (const Error&) {
      bad_value(key, v,
                "expected moreau_jean, moreau_jean_variant, newmark, hht, generalized_alpha or "
                "kh_generalized_alpha");
    }
  } else if (key == "scheme.theta") {
    k.theta = num();
  } else if (key == "scheme.gamma") {
    k.gamma = num();
  } else if (key == "scheme.beta") {
    k.beta = num();
  } else if (key == "scheme.alpha_m") {
    k.alpha_m = num();
  } else if (key == "scheme.alpha_f") {
    k.alpha_f = num();
  } else if (key == "scheme.alpha") {
    k.alpha = num();
  } else if (key == "scheme.rho_inf") {
    k.rho_inf = num();
  } else if (key == "run.h") {
    c.h = num();
  } else if (key == "run.t_end") {
    c.t_end = num();
  } else if (key == "run.output_dir") {
    if (value.empty()) {
      bad_value(key, v, "expected a directory");
    }
    c.output_dir = value;
  } else if (key == "run.audit") {
    c.audit = parse_bool(v, key);
  } else if (key == "run.lcp_solver") {
    if (v == "lemke") {
      c.lcp_method = LcpMethod::Lemke;
    } else if (v == "pgs") {
      c.lcp_method = LcpMethod::Pgs;
    } else {
      bad_value(key, v, "expected lemke or pgs");
    }
  } else if (key == "tol.residual") {
    c.residual_tol = num();
    c.residual_tol_set = true;
  } else if (key == "tol.lcp") {
    c.lcp_tol = num();
  } else {
    fail(ErrorCode::ConfigParse, std::string(key), "unknown key");
  }
}

RunConfig parse_config(std::string_view text, std::string_view source) {
  RunConfig config;
  std::set<std::string, std::less<>> seen;
  std::size_t line_no = 0;
  while (!text.empty() || line_no == 0) {
    ++line_no;
    const auto nl = text.find('\n');
    const std::string_view line = trim(strip_comment(text.substr(0, nl)));
    text = nl == std::string_view::npos ? std::string_view() : text.substr(nl + 1);
    if (line.empty()) {
      continue;
    }
    const std::string where = std::string(source) + ":" + std::to_string(line_no) + ": ";
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      fail(ErrorCode::ConfigParse, "", where + "expected 'key = value', got '" + std::string(line) + "'");
    }
    const std::string_view key = trim(line.substr(0, eq));
    const std::string_view value = trim(line.substr(eq + 1));
    if (key.empty()) {
      fail(ErrorCode::ConfigParse, "", where + "missing key");
    }
    if (!seen.insert(std::string(key)).second) {
      fail(ErrorCode::ConfigParse, std::string(key), where + "duplicate key '" + std::string(key) + "'");
    }
    try {
      apply_setting(config, key, value);
    } catch (const Error& e) {
      throw Error(ErrorCode::ConfigParse, e.field(), where + e.what());
    }
  }
  config.validate();
  return config;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    fail(ErrorCode::ConfigParse, "config", "cannot read '" + path + "'");
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path);
}

void apply_environment(RunConfig& config) {
  const char* env = std::getenv("NSC_TOL");
  if (env == nullptr || *env == '\0' || config.residual_tol_set) {
    return;
  }
  const double tol = parse_double(trim(env), "NSC_TOL");
  if (!(tol > 0.0)) {
    fail(ErrorCode::ConfigParse, "NSC_TOL", "tolerance must be positive");
  }
  config.residual_tol = tol;
}

}  // namespace nsc
