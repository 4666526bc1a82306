#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "nsc/commands.hpp"
#include "nsc/nsc.h"

struct nsc_config {
  nsc::RunConfig config;
};

struct nsc_run {
  nsc::RunOutput output;
};

namespace {

thread_local std::string last_error;

nsc_status status_of(nsc::ErrorCode code) {
  using nsc::ErrorCode;
  switch (code) {
    case ErrorCode::ConfigParse:
    case ErrorCode::InvalidSpec:
    case ErrorCode::InconsistentSpec: return NSC_ERR_CONFIG;
    case ErrorCode::NonSymmetric:
    case ErrorCode::NotPositiveDefinite:
    case ErrorCode::NotSemiDefinite:
    case ErrorCode::DimensionMismatch:
    case ErrorCode::RestitutionOutOfRange:
    case ErrorCode::InvalidForcing: return NSC_ERR_MODEL;
    case ErrorCode::LcpFailure:
    case ErrorCode::SingularIterationMatrix:
    case ErrorCode::MissingHistory: return NSC_ERR_SOLVER;
    case ErrorCode::NotApplicable:
    case ErrorCode::NotAvailable: return NSC_ERR_NOT_AVAILABLE;
    case ErrorCode::Io: return NSC_ERR_IO;
  }
  return NSC_ERR_INTERNAL;
}

template <class F>
nsc_status guarded(F&& f) {
  try {
    f();
    last_error.clear();
    return NSC_OK;
  } catch (const nsc::Error& e) {
    last_error = e.what();
    return status_of(e.code());
  } catch (const std::exception& e) {
    last_error = e.what();
    return NSC_ERR_INTERNAL;
  } catch (...) {
    last_error = "unknown error";
    return NSC_ERR_INTERNAL;
  }
}

nsc_status invalid(const char* what) {
  last_error = what;
  return NSC_ERR_INVALID_ARGUMENT;
}

template <class F>
int guarded_cmd(F&& f) {
  try {
    return f();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return nsc::kExitSolverFailure;
  }
}

std::optional<std::string> opt(const char* s) { return s ? std::optional<std::string>(s) : std::nullopt; }

}  // namespace

extern "C" {

const char* nsc_version(void) { return "1.0.0"; }

const char* nsc_last_error(void) { return last_error.c_str(); }

nsc_status nsc_config_load(const char* path, nsc_config** out) {
  if (!path || !out) return invalid("path and out must be non-null");
  *out = nullptr;
  return guarded([&] {
    auto c = std::make_unique<nsc_config>();
    c->config = nsc::load_config(path);
    nsc::apply_environment(c->config);
    *out = c.release();
  });
}

nsc_status nsc_config_parse(const char* text, nsc_config** out) {
  if (!text || !out) return invalid("text and out must be non-null");
  *out = nullptr;
  return guarded([&] {
    auto c = std::make_unique<nsc_config>();
    c->config = nsc::parse_config(text);
    nsc::apply_environment(c->config);
    *out = c.release();
  });
}

nsc_status nsc_config_set(nsc_config* config, const char* key, const char* value) {
  if (!config || !key || !value) return invalid("config, key and value must be non-null");
  return guarded([&] {
    nsc::RunConfig updated = config->config;
    nsc::apply_setting(updated, key, value);
    updated.validate();
    config->config = std::move(updated);
  });
}

void nsc_config_free(nsc_config* config) { delete config; }

nsc_status nsc_run_create(const nsc_config* config, nsc_run** out) {
  if (!config || !out) return invalid("config and out must be non-null");
  *out = nullptr;
  return guarded([&] { *out = new nsc_run{nsc::run_config(config->config)}; });
}

void nsc_run_free(nsc_run* run) { delete run; }

size_t nsc_run_steps(const nsc_run* run) { return run ? run->output.trajectory.records.size() : 0; }

size_t nsc_run_dofs(const nsc_run* run) { return run ? static_cast<size_t>(run->output.scenario.model.n()) : 0; }

size_t nsc_run_contacts(const nsc_run* run) {
  return run ? static_cast<size_t>(run->output.scenario.model.m()) : 0;
}

nsc_status nsc_run_state(const nsc_run* run, size_t k, double* t, double* q, double* v) {
  if (!run) return invalid("run must be non-null");
  if (k >= run->output.trajectory.states.size()) return invalid("state index out of range");
  const nsc::SystemState& s = run->output.trajectory.states[k];
  if (t) *t = s.t;
  if (q) std::copy(s.q.data(), s.q.data() + s.q.size(), q);
  if (v) std::copy(s.v.data(), s.v.data() + s.v.size(), v);
  last_error.clear();
  return NSC_OK;
}

nsc_status nsc_run_impulse(const nsc_run* run, size_t k, double* P) {
  if (!run || !P) return invalid("run and P must be non-null");
  if (k == 0 || k > run->output.trajectory.records.size()) return invalid("step index out of range");
  const nsc::Vector& p = run->output.trajectory.records[k - 1].P;
  std::copy(p.data(), p.data() + p.size(), P);
  last_error.clear();
  return NSC_OK;
}

nsc_status nsc_run_audit(const nsc_run* run, size_t k, double* residual, double* tolerance, double* dissipation,
                         int* identity_ok, int* dissipation_satisfied) {
  if (!run) return invalid("run must be non-null");
  if (k == 0 || k > run->output.trajectory.records.size()) return invalid("step index out of range");
  const nsc::StepRecord& r = run->output.trajectory.records[k - 1];
  if (!r.audited) {
    last_error = "run was not audited (run.audit = false)";
    return NSC_ERR_NOT_AVAILABLE;
  }
  if (residual) *residual = r.identity_residual;
  if (tolerance) *tolerance = r.identity_tolerance;
  if (dissipation) *dissipation = r.dissipation;
  if (identity_ok) *identity_ok = r.identity_ok ? 1 : 0;
  if (dissipation_satisfied) *dissipation_satisfied = r.dissipation_satisfied ? 1 : 0;
  last_error.clear();
  return NSC_OK;
}

size_t nsc_run_audit_violations(const nsc_run* run) { return run ? nsc::summarize(run->output).violations : 0; }

nsc_status nsc_run_write_csv(const nsc_run* run, const char* dir) {
  if (!run || !dir) return invalid("run and dir must be non-null");
  return guarded([&] {
    std::filesystem::create_directories(dir);
    const std::filesystem::path base(dir);
    std::ofstream traj(base / "trajectory.csv", std::ios::binary | std::ios::trunc);
    if (!traj) nsc::fail(nsc::ErrorCode::Io, "dir", std::string("cannot write into '") + dir + "'");
    nsc::write_trajectory_csv(run->output, traj);
    if (run->output.config.audit) {
      std::ofstream audit(base / "audit.csv", std::ios::binary | std::ios::trunc);
      nsc::write_audit_csv(run->output, audit);
    }
  });
}

int nsc_cmd_simulate(const char* config_path, const char* out_dir, int force_audit) {
  if (!config_path) return nsc::kExitConfigError;
  return guarded_cmd([&] { return nsc::cmd_simulate(config_path, opt(out_dir), force_audit != 0, std::cerr); });
}

int nsc_cmd_sweep(const char* config_path, const char* grid, const char* out_dir) {
  if (!config_path || !grid) return nsc::kExitConfigError;
  return guarded_cmd([&] { return nsc::cmd_sweep(config_path, grid, opt(out_dir), std::cerr); });
}

int nsc_cmd_convergence(const char* config_path, const char* h_list, const char* out_dir) {
  if (!config_path || !h_list) return nsc::kExitConfigError;
  return guarded_cmd([&] { return nsc::cmd_convergence(config_path, h_list, opt(out_dir), std::cerr); });
}

nsc_status nsc_lcp_solve(size_t s, const double* W, const double* b, int method, double tol, double* z,
                         double* residual) {
  if ((s > 0 && (!W || !b || !z)) || (method != 0 && method != 1)) return invalid("bad LCP arguments");
  return guarded([&] {
    nsc::lcp::LcpProblem p;
    const auto n = static_cast<Eigen::Index>(s);
    p.W = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(W, n, n);
    p.b = Eigen::Map<const nsc::Vector>(b, n);
    const double t = tol > 0.0 ? tol : nsc::lcp::kDefaultTol;
    const nsc::lcp::LcpSolution sol = method == 0 ? nsc::lcp::solve_lemke(p, t) : nsc::lcp::solve_pgs(p, t);
    if (residual) *residual = sol.residual;
    if (sol.status != nsc::lcp::LcpStatus::Solved) {
      nsc::fail(nsc::ErrorCode::LcpFailure, "lcp", "solver did not converge");
    }
    std::copy(sol.z.data(), sol.z.data() + sol.z.size(), z);
  });
}

}  // extern "C"
