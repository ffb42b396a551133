#ifndef EIMS_CAPI_H
#define EIMS_CAPI_H

#include <stdint.h>

#if defined(_WIN32)
#define EIMS_API __declspec(dllexport)
#else
#define EIMS_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes (also used as CLI exit codes). */
#define EIMS_OK 0
#define EIMS_ERROR 1
#define EIMS_INVALID_CONFIG 2
#define EIMS_CHECK_VIOLATION 3

typedef struct eims_config eims_config;

/* Message for the most recent failure on this thread; never NULL. */
EIMS_API const char* eims_last_error(void);

/* Configs are opaque; NULL return means failure (see eims_last_error). */
EIMS_API eims_config* eims_config_load(const char* path);
EIMS_API eims_config* eims_config_from_json(const char* json_text);
EIMS_API eims_config* eims_config_preset(const char* name);
EIMS_API void eims_config_free(eims_config* cfg);

EIMS_API int eims_config_set_seed(eims_config* cfg, uint64_t seed);
EIMS_API int eims_config_set_trials(eims_config* cfg, int trials);
EIMS_API int eims_config_set_horizon(eims_config* cfg, int horizon);
EIMS_API int eims_config_set_threads(eims_config* cfg, int threads);
EIMS_API int eims_config_set_out_dir(eims_config* cfg, const char* out_dir);

/* Runs all trials and writes traces/, aggregate.csv, SVG plots and the
 * resolved config under the config's out_dir. */
EIMS_API int eims_run_experiment(const eims_config* cfg);

/* Runs the verification battery (all checks when `check` is NULL or empty)
 * and writes a CSV report when out_csv is non-NULL. Returns
 * EIMS_CHECK_VIOLATION if any inequality failed. violations_out may be NULL. */
EIMS_API int eims_verify(const char* check, const char* out_csv,
                         long long* violations_out);

/* Greedy information-gain curve for the config's grid/kernel, written as CSV. */
EIMS_API int eims_mig_curve(const eims_config* cfg, const char* out_csv);

/* Re-renders the SVG plots from <results_dir>/aggregate.csv. */
EIMS_API int eims_plot(const char* results_dir);

EIMS_API int eims_preset_count(void);
EIMS_API const char* eims_preset_name(int index);
EIMS_API const char* eims_preset_json(const char* name);

#ifdef __cplusplus
}
#endif

#endif /* EIMS_CAPI_H */
