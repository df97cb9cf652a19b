#ifndef BOREAL_C_H
#define BOREAL_C_H

#include <stddef.h>
#include <stdint.h>

#if defined(__GNUC__)
#define BOREAL_C_API __attribute__((visibility("default")))
#else
#define BOREAL_C_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes returned by every call that can fail. */
#define BOREAL_OK 0
#define BOREAL_ERR_CONFIG 2
#define BOREAL_ERR_PHYSICS 3
#define BOREAL_ERR_CONTRACT 5

typedef struct boreal_env boreal_env;

/* Library version string. */
BOREAL_C_API const char* boreal_version(void);

/* Creates an environment. `mode` is "site_specific" or "generalist";
   `overrides` holds "key = value" lines (may be NULL). On failure returns NULL
   and writes the message (naming an offending key) into `err`. */
BOREAL_C_API boreal_env* boreal_env_create(const char* mode, const char* overrides, char* err, size_t err_len);
BOREAL_C_API void boreal_env_destroy(boreal_env* env);

BOREAL_C_API size_t boreal_env_observation_size(const boreal_env* env);
BOREAL_C_API int boreal_action_count(void);

/* Starts episode `episode` of the stream keyed by `seed` with carbon weight
   `preference`; writes the observation. */
BOREAL_C_API int boreal_env_reset(boreal_env* env, uint64_t seed, uint64_t episode, double preference,
                     double* observation, size_t observation_len);

/* Advances one year. `reward` receives [carbon, thaw]. */
BOREAL_C_API int boreal_env_step(boreal_env* env, int action, double* observation, size_t observation_len,
                    double* reward, int* terminated, int* truncated);

/* Valid-action flags (1 valid, 0 masked) for all actions. */
BOREAL_C_API int boreal_env_action_mask(const boreal_env* env, int* mask, size_t mask_len);

/* Info of the last step: a fixed list of named scalars. */
BOREAL_C_API size_t boreal_info_count(void);
BOREAL_C_API const char* boreal_info_name(size_t index);
BOREAL_C_API int boreal_env_info(const boreal_env* env, double* values, size_t values_len);

/* Message of the last failed call on `env`. */
BOREAL_C_API const char* boreal_env_last_error(const boreal_env* env);

#ifdef __cplusplus
}
#endif

#endif
