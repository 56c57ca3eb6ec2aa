/*
 * attrdisam C interface.
 *
 * Every function returns an ad_status. On failure a message describing the
 * error is available from ad_last_error() on the same thread until the next
 * call. Strings returned through `char** out` parameters are owned by the
 * caller and must be released with ad_string_free(). Handles are released
 * with their matching *_free function; passing NULL to a free function is a
 * no-op.
 *
 * Structured values (scenes, actions, observations, reports) cross the
 * boundary as UTF-8 JSON text.
 */
#ifndef ATTRDISAM_H
#define ATTRDISAM_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(ATTRDISAM_BUILDING)
#    define AD_API __declspec(dllexport)
#  else
#    define AD_API __declspec(dllimport)
#  endif
#else
#  define AD_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ad_status {
  AD_OK = 0,
  AD_ERR_INVALID_ARGUMENT = 1,
  AD_ERR_CONFIG = 2,
  AD_ERR_SCHEMA = 3,
  AD_ERR_VALIDATION = 4,
  AD_ERR_DOMAIN = 5,
  AD_ERR_CONFIG_INFEASIBLE = 6,
  AD_ERR_INCOMPATIBLE_OBSERVATION = 7,
  AD_ERR_STEP_LIMIT = 8,
  AD_ERR_UNKNOWN_SESSION = 9,
  AD_ERR_SESSION_DONE = 10,
  AD_ERR_IO = 11,
  AD_ERR_INTERNAL = 12
} ad_status;

typedef struct ad_config ad_config;
typedef struct ad_scene ad_scene;
typedef struct ad_grounding ad_grounding;
typedef struct ad_suite ad_suite;
typedef struct ad_report ad_report;
typedef struct ad_sessions ad_sessions;

/* ---- library ---------------------------------------------------------- */

AD_API const char* ad_version(void);
AD_API const char* ad_status_name(ad_status status);
AD_API const char* ad_last_error(void);
AD_API void ad_string_free(char* s);
/* Comma-separated policy names accepted wherever a policy is named. */
AD_API ad_status ad_policy_names(char** out);
/* Comma-separated words of "color" or "location", in column order. */
AD_API ad_status ad_vocabulary(const char* attribute, char** out);

/* ---- configuration ---------------------------------------------------- */

AD_API ad_status ad_config_new(ad_config** out);
/* Reads a flat `key = value` file or a JSON object. */
AD_API ad_status ad_config_load(const char* path, ad_config** out);
AD_API ad_status ad_config_set(ad_config* cfg, const char* key, const char* value);
AD_API ad_status ad_config_validate(const ad_config* cfg);
/* Flat JSON object of every key and its effective value. */
AD_API ad_status ad_config_to_json(const ad_config* cfg, char** out);
AD_API void ad_config_free(ad_config* cfg);

/* ---- scenes ----------------------------------------------------------- */

/* Uses the scene.* keys of `cfg`; cfg may be NULL for defaults. */
AD_API ad_status ad_scene_generate(const ad_config* cfg, uint64_t seed, ad_scene** out);
AD_API ad_status ad_scene_from_json(const char* json, ad_scene** out);
AD_API ad_status ad_scene_load(const char* path, ad_scene** out);
AD_API ad_status ad_scene_save(const ad_scene* scene, const char* path);
AD_API ad_status ad_scene_to_json(const ad_scene* scene, char** out);
AD_API ad_status ad_scene_size(const ad_scene* scene, size_t* out);
AD_API void ad_scene_free(ad_scene* scene);

/* ---- grounding -------------------------------------------------------- */

AD_API ad_status ad_grounding_simulate(const ad_scene* scene, const ad_config* cfg, uint64_t seed,
                                       ad_grounding** out);
AD_API ad_status ad_grounding_from_json(const char* json, ad_grounding** out);
AD_API ad_status ad_grounding_load(const char* path, ad_grounding** out);
AD_API ad_status ad_grounding_save(const ad_grounding* g, const char* path);
AD_API ad_status ad_grounding_to_json(const ad_grounding* g, char** out);
AD_API ad_status ad_grounding_size(const ad_grounding* g, size_t* out);
AD_API void ad_grounding_free(ad_grounding* g);

/* ---- belief and planning ---------------------------------------------- */

/* out_probs must hold n values. */
AD_API ad_status ad_init_belief(const double* scores, size_t n, double* out_probs);

/*
 * One decision of `policy` from belief `probs` (length = grounding size).
 * Writes {"action": {...}, "expansions": N}.
 */
AD_API ad_status ad_plan(const ad_grounding* g, const ad_config* cfg, const char* policy,
                         const double* probs, size_t n, int questions_asked, uint64_t seed,
                         char** out);

/*
 * Bayes update of `probs` after `action_json` produced `observation_json`.
 * out_probs must hold n values; *zero_evidence (if not NULL) is set to 1 when
 * the observation had zero likelihood and the belief was left unchanged.
 */
AD_API ad_status ad_update_belief(const ad_grounding* g, const ad_config* cfg, const double* probs,
                                  size_t n, const char* action_json, const char* observation_json,
                                  double* out_probs, int* zero_evidence);

/* One simulated episode; writes the episode record as JSON. */
AD_API ad_status ad_episode_run(const ad_scene* scene, const ad_config* cfg, const char* policy,
                                uint64_t seed, int include_timing, char** out);

/* ---- suites and reports ----------------------------------------------- */

AD_API ad_status ad_suite_generate(const ad_config* cfg, uint64_t seed, ad_suite** out);
AD_API ad_status ad_suite_load(const char* path, ad_suite** out);
AD_API ad_status ad_suite_save(const ad_suite* suite, const char* path);
AD_API ad_status ad_suite_to_json(const ad_suite* suite, char** out);
AD_API ad_status ad_suite_size(const ad_suite* suite, size_t* out);
AD_API void ad_suite_free(ad_suite* suite);

/* `policies` is a comma-separated list of policy names. */
AD_API ad_status ad_suite_run(const ad_suite* suite, const ad_config* cfg, const char* policies,
                              uint64_t seed, ad_report** out);
AD_API ad_status ad_report_csv(const ad_report* report, int include_timing, char** out);
AD_API ad_status ad_report_json(const ad_report* report, int include_timing, char** out);
AD_API ad_status ad_report_records_jsonl(const ad_report* report, int include_timing, char** out);
AD_API void ad_report_free(ad_report* report);

/*
 * First-decision cost per scene size. `format` 0 writes CSV, 1 writes JSON.
 */
AD_API ad_status ad_scaling_run(const ad_config* cfg, const int* n_values, size_t count,
                                const char* policies, uint64_t seed, int scenes_per_n, int format,
                                int include_timing, char** out);

/* ---- interactive sessions --------------------------------------------- */

AD_API ad_status ad_sessions_new(const ad_config* cfg, ad_sessions** out);
AD_API ad_status ad_session_start(ad_sessions* sessions, const char* request_json, char** out);
AD_API ad_status ad_session_answer(ad_sessions* sessions, const char* session_id, const char* text,
                                   char** out);
AD_API ad_status ad_session_get(const ad_sessions* sessions, const char* session_id, char** out);
AD_API void ad_sessions_free(ad_sessions* sessions);

#ifdef __cplusplus
}
#endif

#endif /* ATTRDISAM_H */
