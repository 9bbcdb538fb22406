#ifndef COSSERAT_H
#define COSSERAT_H

/*
 * C API of the cosserat analysis library.
 *
 * All state lives behind opaque handles. Functions return COSSERAT_OK on
 * success; on failure they return a status code and leave a description in
 * cosserat_last_error() (thread-local). Strings returned through char**
 * outputs are owned by the caller and released with cosserat_string_free().
 */

#include <stdint.h>

#if defined(_WIN32)
#define COSSERAT_API __declspec(dllexport)
#else
#define COSSERAT_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum cosserat_status {
  COSSERAT_OK = 0,
  COSSERAT_ERR_IO = 1,
  COSSERAT_ERR_PARSE = 2,
  COSSERAT_ERR_INVALID = 3, /* semantic, domain or composability error */
  COSSERAT_ERR_NUMERIC = 4, /* singular jet, failed evaluation, escaped flow */
  COSSERAT_ERR_INTERNAL = 5
} cosserat_status;

typedef struct cosserat_config cosserat_config;
typedef struct cosserat_report cosserat_report;

COSSERAT_API const char* cosserat_version(void);

/* Message describing the most recent failure in the calling thread. */
COSSERAT_API const char* cosserat_last_error(void);

/* Config files use TOML syntax; see the project README for the schema. */
COSSERAT_API cosserat_status cosserat_config_load(const char* path, cosserat_config** out);
COSSERAT_API cosserat_status cosserat_config_parse(const char* text, cosserat_config** out);
COSSERAT_API cosserat_status cosserat_config_set_seed(cosserat_config* cfg, uint64_t seed);
COSSERAT_API cosserat_status cosserat_config_set_grid(cosserat_config* cfg, int grid);
COSSERAT_API void cosserat_config_free(cosserat_config* cfg);

/*
 * Plug-in mechanical response: write out_dim values into out for the jet
 * with source x and row-major coordinate blocks P (n*n), Q (n*n) and R
 * (n*n*n, R[(j*n+i)*n+k]). Return 0 on success, nonzero to signal an
 * evaluation failure. Registered responses are selected from configs via
 * medium.plugin = "<name>". The callback must be reentrant.
 */
typedef int (*cosserat_response_fn)(void* user, const double* x, const double* P,
                                    const double* Q, const double* R, double* out);
COSSERAT_API cosserat_status cosserat_register_response(const char* name, int dim, int out_dim,
                                                        cosserat_response_fn fn, void* user);

/*
 * Runs one analysis command: axioms | prolong | uniformity | homogeneity |
 * symmetry | obstruction. A report object is produced whenever the command
 * was dispatched, including failed runs; its exit code follows the CLI
 * convention 0 = verdict computed, 2 = inconclusive, 1 = error.
 */
COSSERAT_API cosserat_status cosserat_run(const cosserat_config* cfg, const char* command,
                                          cosserat_report** out);
COSSERAT_API int cosserat_report_exit_code(const cosserat_report* rep);
COSSERAT_API const char* cosserat_report_json(const cosserat_report* rep);
/* CSV grid for the obstruction command; empty string otherwise. */
COSSERAT_API const char* cosserat_report_csv(const cosserat_report* rep);
COSSERAT_API void cosserat_report_free(cosserat_report* rep);

/*
 * Second-order jet utilities over the flat JSON encoding
 * {n, x, y, P, Q, R}.
 */
COSSERAT_API cosserat_status cosserat_jet_compose(const char* g2_json, const char* g1_json,
                                                  char** out_json);
COSSERAT_API cosserat_status cosserat_jet_invert(const char* g_json, char** out_json);
COSSERAT_API cosserat_status cosserat_jet_identity(const double* x, int n, char** out_json);
/* 1 = holonomic, 0 = not, -1 = error */
COSSERAT_API int cosserat_jet_is_holonomic(const char* g_json, double tol);

COSSERAT_API void cosserat_string_free(char* s);

#ifdef __cplusplus
}
#endif

#endif /* COSSERAT_H */
