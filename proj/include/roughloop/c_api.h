/* C interface to the roughloop experiment library.
 *
 * Objects are opaque handles released with their rl_*_free function. Every
 * call that can fail returns an rl_status; on failure rl_last_error() gives a
 * message for the calling thread, valid until that thread's next failing call.
 */
#ifndef ROUGHLOOP_C_API_H
#define ROUGHLOOP_C_API_H

#include <stddef.h>
#include <stdint.h>

#if defined(RL_BUILDING_LIBRARY)
#define RL_API __attribute__((visibility("default")))
#else
#define RL_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum rl_status {
  RL_OK = 0,
  RL_ERR_INVALID_ARGUMENT = 1,
  RL_ERR_LEVEL_MISMATCH = 2,
  RL_ERR_OUT_OF_RANGE = 3,
  RL_ERR_CUT_LOCUS = 4,
  RL_ERR_NOT_CLOSED = 5,
  RL_ERR_OUTSIDE_DOMAIN = 6,
  RL_ERR_CONFIG = 7,
  RL_ERR_INTERNAL = 99
} rl_status;

typedef struct rl_config rl_config;
typedef struct rl_result rl_result;

RL_API const char* rl_version(void);
RL_API const char* rl_last_error(void);
RL_API const char* rl_status_name(rl_status s);

/* Configuration. Text uses [run], [besov] and [params] sections. */
RL_API rl_status rl_config_parse(const char* text, rl_config** out);
RL_API rl_status rl_config_load(const char* path, rl_config** out);
RL_API rl_status rl_config_default(const char* experiment, rl_config** out);
/* section is "run", "besov" or "params". */
RL_API rl_status rl_config_set(rl_config* cfg, const char* section, const char* key, const char* value);
RL_API uint64_t rl_config_seed(const rl_config* cfg);
/* Fills the handle's error list; returns RL_OK when it is empty, RL_ERR_CONFIG otherwise. */
RL_API rl_status rl_config_validate(rl_config* cfg);
RL_API size_t rl_config_error_count(const rl_config* cfg);
RL_API const char* rl_config_error(const rl_config* cfg, size_t i);
RL_API void rl_config_free(rl_config* cfg);

/* Experiment registry. */
RL_API size_t rl_experiment_count(void);
RL_API const char* rl_experiment_name(size_t i);
RL_API const char* rl_experiment_description(size_t i);

/* Runs a validated configuration on `workers` threads. Output is identical for any worker count. */
RL_API rl_status rl_run(const rl_config* cfg, int workers, rl_result** out);
/* CSV text owned by the result; include_timing=0 leaves wall_time_ms empty. */
RL_API const char* rl_result_csv(rl_result* res, int include_timing);
RL_API size_t rl_result_row_count(const rl_result* res);
RL_API size_t rl_result_breach_count(const rl_result* res);
RL_API const char* rl_result_breach(const rl_result* res, size_t i);
RL_API void rl_result_free(rl_result* res);

/* Small numerical helpers. Matrices are 3x3 row-major. */
RL_API rl_status rl_so3_exp(const double v[3], double out[9]);
RL_API rl_status rl_so3_log(const double g[9], double out[3]);
/* ||x||_{m,theta} of a scalar path sampled at 2^level + 1 dyadic points. */
RL_API rl_status rl_path_besov_norm(const double* values, size_t n_values, int m, double theta, double* out);

#ifdef __cplusplus
}
#endif

#endif /* ROUGHLOOP_C_API_H */
