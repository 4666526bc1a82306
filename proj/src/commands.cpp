#include "nsc/commands.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <future>
#include <limits>
#include <mutex>
#include <ostream>
#include <thread>

#include "nsc/energy.hpp"

namespace nsc {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string_view::npos) {
    return {};
  }
  return s.substr(first, s.find_last_not_of(" \t") - first + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  while (true) {
    const auto pos = s.find(sep);
    out.push_back(trim(s.substr(0, pos)));
    if (pos == std::string_view::npos) {
      return out;
    }
    s.remove_prefix(pos + 1);
  }
}

std::filesystem::path prepare_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    fail(ErrorCode::Io, "run.output_dir", "cannot create '" + dir + "': " + ec.message());
  }
  return dir;
}

template <class Writer>
void write_file(const std::filesystem::path& path, Writer&& writer) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    fail(ErrorCode::Io, "output", "cannot open '" + path.string() + "'");
  }
  writer(out);
  out.flush();
  if (!out) {
    fail(ErrorCode::Io, "output", "write to '" + path.string() + "' failed");
  }
}

const char* flag(bool b) { return b ? "true" : "false"; }

RunConfig load_with_env(const std::string& path) {
  RunConfig config = load_config(path);
  apply_environment(config);
  return config;
}

double state_H(const RunOutput& run, const SystemState& s) {
  if (run.scheme.is_moreau_family()) {
    return energy::total_energy(run.scenario.model, s.q, s.v);
  }
  try {
    return energy::algorithmic_energy(run.scenario.model, s, run.scheme, run.config.h);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::NotApplicable) {
      return kNaN;
    }
    throw;
  }
}

// Maps an exception from a run to an exit code and a diagnostic.
int report(const Error& e, std::ostream& log) {
  log << "error: " << e.what() << '\n';
  return e.code() == ErrorCode::ConfigParse ? kExitConfigError : kExitSolverFailure;
}

void set_grid_value(RunConfig& c, const std::string& name, double x) {
  const std::string value = format_double(x);
  if (name == "gamma_tied") {
    apply_setting(c, "scheme.gamma", value);
    apply_setting(c, "scheme.beta", format_double(0.5 * x));
  } else if (name == "e" || name == "restitution") {
    apply_setting(c, "scenario.restitution", value);
  } else {
    apply_setting(c, "scheme." + name, value);
  }
}

}  // namespace

std::string format_double(double x) {
  if (std::isnan(x)) {
    return "nan";
  }
  if (std::isinf(x)) {
    return x > 0 ? "inf" : "-inf";
  }
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

RunOutput run_config(const RunConfig& config) {
  RunOutput out{config, config.scheme_spec(), build_scenario(config.scenario), {}};
  AuditFlags flags;
  flags.audit = config.audit;
  flags.residual_tol = config.residual_tol;
  StepOptions options;
  options.lcp_method = config.lcp_method;
  options.lcp_tol = config.lcp_tol;
  out.trajectory = simulate(out.scenario.model, out.scenario.state, config.h, out.scheme, config.t_end, flags, options);
  return out;
}

AuditSummary summarize(const RunOutput& run) {
  AuditSummary s;
  s.steps = run.trajectory.records.size();
  s.condition_satisfied = energy::dissipation_condition(run.scenario.model, run.scheme);
  for (const StepRecord& r : run.trajectory.records) {
    if (!r.identity_ok) {
      ++s.violations;
    }
    if (r.dissipation_satisfied) {
      ++s.dissipative_steps;
    }
    const double ratio = std::isnan(r.identity_residual) ? std::numeric_limits<double>::infinity()
                                                         : std::abs(r.identity_residual) / r.identity_tolerance;
    s.max_residual_ratio = std::max(s.max_residual_ratio, ratio);
    if (std::isfinite(r.dissipation)) {
      s.max_energy_gain = std::max(s.max_energy_gain, r.dissipation);
    }
  }
  return s;
}

void write_trajectory_csv(const RunOutput& run, std::ostream& out) {
  const LagrangianModel& model = run.scenario.model;
  const Trajectory& tr = run.trajectory;
  const Eigen::Index n = model.n();
  out << "step,t";
  for (Eigen::Index i = 0; i < n; ++i) out << ",q_" << i;
  for (Eigen::Index i = 0; i < n; ++i) out << ",v_" << i;
  out << ",E,H,W_ext_cum,W_damp_cum,contact_work,residual,active_set,penetration\n";
  double w_ext = 0.0;
  double w_damp = 0.0;
  for (std::size_t k = 0; k < tr.states.size(); ++k) {
    const SystemState& s = tr.states[k];
    const StepRecord* r = k == 0 ? nullptr : &tr.records[k - 1];
    double contact = 0.0;
    double residual = kNaN;
    double penetration = 0.0;
    std::string active;
    if (r != nullptr) {
      const energy::Works w = energy::discrete_works(model, tr.states[k - 1], s, run.config.h, run.scheme);
      w_ext += w.external;
      w_damp += w.damping;
      const double weight = run.scheme.variant == SchemeVariant::MoreauJean ? run.scheme.theta : 0.5;
      contact = energy::contact_work(r->U_prev, r->U_next, r->P, weight);
      residual = r->audited ? r->identity_residual : kNaN;
      penetration = r->penetration;
      for (std::size_t j = 0; j < r->active_set.size(); ++j) {
        active += (j ? ";" : "") + std::to_string(r->active_set[j]);
      }
    } else {
      const Vector g = gap(model, s.q);
      penetration = g.size() ? std::max(0.0, -g.minCoeff()) : 0.0;
    }
    out << (r ? r->step : 0) << ',' << format_double(s.t);
    for (Eigen::Index i = 0; i < n; ++i) out << ',' << format_double(s.q(i));
    for (Eigen::Index i = 0; i < n; ++i) out << ',' << format_double(s.v(i));
    out << ',' << format_double(energy::total_energy(model, s.q, s.v)) << ',' << format_double(state_H(run, s))
        << ',' << format_double(w_ext) << ',' << format_double(w_damp) << ',' << format_double(contact) << ','
        << (r ? format_double(residual) : "") << ',' << active << ',' << format_double(penetration) << '\n';
  }
}

void write_audit_csv(const RunOutput& run, std::ostream& out) {
  out << "step,t,identity_residual,identity_scale,identity_tolerance,identity_ok,dissipation,contact_work,"
         "condition_satisfied,condition_satisfied_active,dissipation_satisfied\n";
  for (const StepRecord& r : run.trajectory.records) {
    out << r.step << ',' << format_double(r.t) << ',' << format_double(r.identity_residual) << ','
        << format_double(r.identity_scale) << ',' << format_double(r.identity_tolerance) << ','
        << flag(r.identity_ok) << ',' << format_double(r.dissipation) << ',' << format_double(r.contact_work) << ','
        << flag(r.condition_satisfied) << ',' << flag(r.condition_satisfied_active) << ','
        << flag(r.dissipation_satisfied) << '\n';
  }
}

std::vector<double> parse_list(std::string_view spec, std::string_view field) {
  std::vector<double> out;
  for (std::string_view item : split(spec, ',')) {
    if (item.empty()) {
      fail(ErrorCode::ConfigParse, std::string(field), "empty entry in '" + std::string(spec) + "'");
    }
    out.push_back(parse_double(item, field));
  }
  return out;
}

Grid parse_grid(std::string_view spec) {
  static const std::vector<std::string> names = {"theta",   "gamma",   "beta", "alpha",       "alpha_m",
                                                 "alpha_f", "rho_inf", "e",    "restitution", "gamma_tied"};
  Grid grid;
  for (std::string_view part : split(spec, ';')) {
    if (part.empty()) {
      continue;
    }
    const auto eq = part.find('=');
    if (eq == std::string_view::npos) {
      fail(ErrorCode::ConfigParse, "grid", "expected name=values, got '" + std::string(part) + "'");
    }
    const std::string name(trim(part.substr(0, eq)));
    if (std::find(names.begin(), names.end(), name) == names.end()) {
      fail(ErrorCode::ConfigParse, "grid", "unknown sweep parameter '" + name + "'");
    }
    for (const auto& existing : grid) {
      if (existing.first == name) {
        fail(ErrorCode::ConfigParse, "grid", "parameter '" + name + "' listed twice");
      }
    }
    const std::string_view values = trim(part.substr(eq + 1));
    std::vector<double> points;
    const auto range = split(values, ':');
    if (range.size() == 3) {
      const double lo = parse_double(range[0], "grid." + name);
      const double hi = parse_double(range[1], "grid." + name);
      int count = 0;
      const auto [ptr, ec] = std::from_chars(range[2].data(), range[2].data() + range[2].size(), count);
      if (ec != std::errc() || ptr != range[2].data() + range[2].size() || count < 1) {
        fail(ErrorCode::ConfigParse, "grid." + name, "range needs lo:hi:count with count >= 1");
      }
      for (int i = 0; i < count; ++i) {
        points.push_back(count == 1 ? lo : lo + (hi - lo) * i / (count - 1));
      }
    } else if (range.size() == 1) {
      points = parse_list(values, "grid." + name);
    } else {
      fail(ErrorCode::ConfigParse, "grid." + name, "range needs lo:hi:count");
    }
    grid.emplace_back(name, std::move(points));
  }
  if (grid.empty() || grid.size() > 2) {
    fail(ErrorCode::ConfigParse, "grid", "sweep over one or two parameters");
  }
  return grid;
}

double fitted_order(const std::vector<double>& h, const std::vector<double>& error) {
  const std::size_t n = h.size();
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = std::log(h[i]);
    const double y = std::log(error[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double den = n * sxx - sx * sx;
  return den == 0.0 ? kNaN : (n * sxy - sx * sy) / den;
}

int cmd_simulate(const std::string& config_path, const std::optional<std::string>& out_dir, bool force_audit,
                 std::ostream& log) {
  try {
    RunConfig config = load_with_env(config_path);
    if (force_audit) {
      config.audit = true;
    }
    if (out_dir) {
      config.output_dir = *out_dir;
    }
    const RunOutput run = run_config(config);
    const auto dir = prepare_dir(config.output_dir);
    write_file(dir / "trajectory.csv", [&](std::ostream& o) { write_trajectory_csv(run, o); });
    log << "scheme " << run.scheme.describe() << ", scenario " << to_string(config.scenario.kind) << ", "
        << run.trajectory.records.size() << " steps\n";
    if (!config.audit) {
      return kExitOk;
    }
    write_file(dir / "audit.csv", [&](std::ostream& o) { write_audit_csv(run, o); });
    const AuditSummary s = summarize(run);
    log << "audit: " << s.violations << " identity violations, max |residual|/tol " << format_double(s.max_residual_ratio)
        << ", dissipative steps " << s.dissipative_steps << "/" << s.steps << ", condition_satisfied "
        << flag(s.condition_satisfied) << '\n';
    return s.violations ? kExitAuditViolation : kExitOk;
  } catch (const Error& e) {
    return report(e, log);
  }
}

int cmd_sweep(const std::string& config_path, const std::string& grid_spec, const std::optional<std::string>& out_dir,
              std::ostream& log) {
  RunConfig base;
  Grid grid;
  try {
    base = load_with_env(config_path);
    base.audit = true;
    if (out_dir) {
      base.output_dir = *out_dir;
    }
    grid = parse_grid(grid_spec);
  } catch (const Error& e) {
    return report(e, log);
  }

  std::vector<std::vector<double>> points;
  for (double a : grid[0].second) {
    if (grid.size() == 1) {
      points.push_back({a});
    } else {
      for (double b : grid[1].second) points.push_back({a, b});
    }
  }

  struct Row {
    AuditSummary summary;
    std::string status = "ok";
    bool config_error = false;
  };
  std::mutex log_mutex;
  auto evaluate = [&](const std::vector<double>& p) {
    Row row;
    try {
      RunConfig c = base;
      for (std::size_t i = 0; i < grid.size(); ++i) set_grid_value(c, grid[i].first, p[i]);
      c.validate();
      row.summary = summarize(run_config(c));
    } catch (const Error& e) {
      row.status = std::string(to_string(e.code()));
      row.config_error = e.code() == ErrorCode::ConfigParse;
      const std::lock_guard<std::mutex> lock(log_mutex);
      log << "grid point";
      for (std::size_t i = 0; i < grid.size(); ++i) log << ' ' << grid[i].first << '=' << format_double(p[i]);
      log << ": " << e.what() << '\n';
    }
    return row;
  };

  // Points run concurrently in batches; rows keep grid order.
  std::vector<Row> rows(points.size());
  const std::size_t width = std::max(1u, std::thread::hardware_concurrency());
  for (std::size_t start = 0; start < points.size(); start += width) {
    const std::size_t stop = std::min(points.size(), start + width);
    std::vector<std::future<Row>> batch;
    for (std::size_t i = start; i < stop; ++i) {
      batch.push_back(std::async(std::launch::async, evaluate, std::cref(points[i])));
    }
    for (std::size_t i = start; i < stop; ++i) rows[i] = batch[i - start].get();
  }

  int code = kExitOk;
  try {
    const auto dir = prepare_dir(base.output_dir);
    write_file(dir / "sweep.csv", [&](std::ostream& o) {
      for (const auto& g : grid) o << g.first << ',';
      o << "steps,condition_satisfied,dissipation_fraction,max_energy_gain,identity_violations,status\n";
      for (std::size_t i = 0; i < points.size(); ++i) {
        const AuditSummary& s = rows[i].summary;
        for (double x : points[i]) o << format_double(x) << ',';
        const double fraction = s.steps ? static_cast<double>(s.dissipative_steps) / s.steps : kNaN;
        o << s.steps << ',' << flag(s.condition_satisfied) << ',' << format_double(fraction) << ','
          << format_double(s.max_energy_gain) << ',' << s.violations << ',' << rows[i].status << '\n';
      }
    });
  } catch (const Error& e) {
    return report(e, log);
  }
  for (const Row& r : rows) {
    if (r.config_error) {
      code = std::max(code, static_cast<int>(kExitConfigError));
    } else if (r.status != "ok") {
      code = code == kExitOk ? kExitSolverFailure : code;
    } else if (r.summary.violations) {
      code = code == kExitOk ? kExitAuditViolation : code;
    }
  }
  log << "sweep: " << points.size() << " grid points written\n";
  return code;
}

int cmd_convergence(const std::string& config_path, const std::string& h_list,
                    const std::optional<std::string>& out_dir, std::ostream& log) {
  RunConfig base;
  std::vector<double> hs;
  try {
    base = load_with_env(config_path);
    base.audit = false;
    if (out_dir) {
      base.output_dir = *out_dir;
    }
    hs = parse_list(h_list, "h");
    if (hs.size() < 3) {
      fail(ErrorCode::ConfigParse, "h", "convergence needs at least three step sizes");
    }
    for (double h : hs) {
      if (!(h > 0.0)) {
        fail(ErrorCode::ConfigParse, "h", "step sizes must be positive");
      }
    }
  } catch (const Error& e) {
    return report(e, log);
  }
  try {
    struct Row {
      double h;
      std::size_t steps;
      double t;
      double eq;
      double ev;
    };
    std::vector<Row> rows;
    for (double h : hs) {
      RunConfig c = base;
      c.h = h;
      const RunOutput run = run_config(c);
      for (const StepRecord& r : run.trajectory.records) {
        if (!r.active_set.empty()) {
          fail(ErrorCode::NotAvailable, "scenario",
               "contact activated at t = " + format_double(r.t) + "; the reference solution assumes free motion");
        }
      }
      const SystemState& last = run.trajectory.states.back();
      const auto [q_ref, v_ref] = reference_solution(c.scenario, last.t);
      rows.push_back({h, run.trajectory.records.size(), last.t, (last.q - q_ref).cwiseAbs().maxCoeff(),
                      (last.v - v_ref).cwiseAbs().maxCoeff()});
    }
    std::vector<double> err;
    for (const Row& r : rows) err.push_back(std::max(r.eq, r.ev));
    const double order = fitted_order(hs, err);
    const auto dir = prepare_dir(base.output_dir);
    write_file(dir / "convergence.csv", [&](std::ostream& o) {
      o << "h,steps,t_final,error_q,error_v,error,fitted_order\n";
      for (std::size_t i = 0; i < rows.size(); ++i) {
        o << format_double(rows[i].h) << ',' << rows[i].steps << ',' << format_double(rows[i].t) << ','
          << format_double(rows[i].eq) << ',' << format_double(rows[i].ev) << ',' << format_double(err[i]) << ','
          << format_double(order) << '\n';
      }
    });
    log << "fitted order " << format_double(order) << " over " << rows.size() << " step sizes\n";
    return kExitOk;
  } catch (const Error& e) {
    return report(e, log);
  }
}

}  // namespace nsc
