/* C interface to the nonsmooth contact integrators. All functions are
   reentrant; handles are not shared between threads without external locking.
   On failure, nsc_last_error() holds a diagnostic for the calling thread. */
#ifndef NSC_NSC_H
#define NSC_NSC_H

#include <stddef.h>

#if defined(_WIN32)
#define NSC_API __declspec(dllexport)
#else
#define NSC_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum nsc_status {
  NSC_OK = 0,
  NSC_ERR_INVALID_ARGUMENT = 1,
  NSC_ERR_CONFIG = 2,
  NSC_ERR_MODEL = 3,
  NSC_ERR_SOLVER = 4,
  NSC_ERR_NOT_AVAILABLE = 5,
  NSC_ERR_IO = 6,
  NSC_ERR_INTERNAL = 7
} nsc_status;

typedef struct nsc_config nsc_config;
typedef struct nsc_run nsc_run;

NSC_API const char* nsc_version(void);
NSC_API const char* nsc_last_error(void);

NSC_API nsc_status nsc_config_load(const char* path, nsc_config** out);
NSC_API nsc_status nsc_config_parse(const char* text, nsc_config** out);
/* Same keys as the config file, e.g. ("scheme.theta", "0.7"). */
NSC_API nsc_status nsc_config_set(nsc_config* config, const char* key, const char* value);
NSC_API void nsc_config_free(nsc_config* config);

/* Runs the configured simulation to completion. */
NSC_API nsc_status nsc_run_create(const nsc_config* config, nsc_run** out);
NSC_API void nsc_run_free(nsc_run* run);

NSC_API size_t nsc_run_steps(const nsc_run* run);
NSC_API size_t nsc_run_dofs(const nsc_run* run);
NSC_API size_t nsc_run_contacts(const nsc_run* run);
/* k in [0, steps]; q and v need room for dofs entries, any may be NULL. */
NSC_API nsc_status nsc_run_state(const nsc_run* run, size_t k, double* t, double* q, double* v);
/* k in [1, steps]; impulses P_k, room for contacts entries. */
NSC_API nsc_status nsc_run_impulse(const nsc_run* run, size_t k, double* P);
/* k in [1, steps]; audit quantities of the step ending at t_k. */
NSC_API nsc_status nsc_run_audit(const nsc_run* run, size_t k, double* residual, double* tolerance,
                                 double* dissipation, int* identity_ok, int* dissipation_satisfied);
NSC_API size_t nsc_run_audit_violations(const nsc_run* run);
NSC_API nsc_status nsc_run_write_csv(const nsc_run* run, const char* dir);

/* Command-line entry points; return the process exit code
   (0 ok, 1 solver failure, 2 audit violation, 3 config error). */
NSC_API int nsc_cmd_simulate(const char* config_path, const char* out_dir, int force_audit);
NSC_API int nsc_cmd_sweep(const char* config_path, const char* grid, const char* out_dir);
NSC_API int nsc_cmd_convergence(const char* config_path, const char* h_list, const char* out_dir);

/* Dense LCP 0 <= z _|_ W z + b >= 0, W row-major s x s. method 0 = Lemke, 1 = PGS. */
NSC_API nsc_status nsc_lcp_solve(size_t s, const double* W, const double* b, int method, double tol, double* z,
                                 double* residual);

#ifdef __cplusplus
}
#endif

#endif
