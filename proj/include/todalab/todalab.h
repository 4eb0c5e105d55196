/* C interface to the todalab core. All functions are thread-safe with respect
 * to distinct handles; tl_last_error is per thread. */
#ifndef TODALAB_TODALAB_H
#define TODALAB_TODALAB_H

#include <stddef.h>

#if defined(TODALAB_BUILDING)
#define TL_API __attribute__((visibility("default")))
#else
#define TL_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum tl_status {
  TL_OK = 0,
  TL_ERR_INVALID_ARGUMENT = 1,
  TL_ERR_DOMAIN = 2,
  TL_ERR_CONFIG = 3,
  TL_ERR_NUMERICAL = 4,
  TL_ERR_IO = 5,
  TL_ERR_MARGIN = 6,
  TL_ERR_VERIFICATION = 7,
  TL_ERR_INTERNAL = 8
} tl_status;

typedef struct tl_state tl_state;
typedef struct tl_run tl_run;

TL_API const char* tl_version(void);
/* Message of the last failing call on this thread ("" if none). */
TL_API const char* tl_last_error(void);
TL_API const char* tl_status_name(tl_status s);

/* Lattice states: n sites starting at `offset`, background (1/2, 0). */
TL_API tl_status tl_state_create(size_t n, long offset, const double* a, const double* b,
                                 tl_state** out);
TL_API tl_status tl_state_from_soliton(double kappa, int sign, double q, double delta,
                                       size_t n, long offset, double t, tl_state** out);
TL_API tl_status tl_state_load_csv(const char* path, tl_state** out);
TL_API tl_status tl_state_save_csv(const tl_state* s, const char* path);
TL_API void tl_state_destroy(tl_state* s);
TL_API size_t tl_state_size(const tl_state* s);
TL_API long tl_state_offset(const tl_state* s);
/* Copies the window into caller buffers of tl_state_size() entries. */
TL_API tl_status tl_state_get(const tl_state* s, double* a, double* b);

TL_API tl_status tl_jacobi_norm(const tl_state* s, double* out);
TL_API tl_status tl_hamiltonian(const tl_state* s, double* out);
TL_API tl_status tl_optimal_mu(double* mu, double* factor);
TL_API tl_status tl_velocity_toda(double mu, double lnorm, double* out);

/* Advances the state in place along the Toda flow to time t. `method` is
 * "rk-adaptive" (uses tolerance) or "rk4-fixed" (uses step). */
TL_API tl_status tl_integrate(tl_state* s, double t, const char* method, double tolerance,
                              double step);

/* Experiments. `origin` names the config in diagnostics (may be NULL);
 * `out_dir` may be NULL to skip artifacts. A run handle is produced for every
 * outcome, including config errors (exit code 2). */
TL_API tl_status tl_default_config_json(char** out);
TL_API void tl_string_free(char* s);
TL_API tl_status tl_run_config(const char* config_json, const char* origin, const char* out_dir,
                               tl_run** out);
TL_API tl_status tl_sweep_config(const char* config_json, const char* origin, const char* axis,
                                 const double* values, size_t n_values, const char* out_dir,
                                 unsigned jobs, tl_run** out);
TL_API int tl_run_exit_code(const tl_run* r);
TL_API const char* tl_run_summary_json(const tl_run* r);
TL_API const char* tl_run_message(const tl_run* r);
TL_API void tl_run_destroy(tl_run* r);

#ifdef __cplusplus
}
#endif

#endif
