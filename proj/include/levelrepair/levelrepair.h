#ifndef LEVELREPAIR_H
#define LEVELREPAIR_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(LEVELREPAIR_BUILDING)
#define LR_API __declspec(dllexport)
#else
#define LR_API __declspec(dllimport)
#endif
#else
#define LR_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Return codes. Values are stable. */
typedef enum lr_status {
  LR_OK = 0,
  LR_INVALID_ARGUMENT = 1,
  LR_IO_ERROR = 2,
  LR_CONFIG_ERROR = 3,
  LR_UNKNOWN_GLYPH = 4,
  LR_RAGGED_ROWS = 5,
  LR_EMPTY_INPUT = 6,
  LR_EMPTY_CORPUS = 7,
  LR_CORPUS_PARSE_ERROR = 8,
  LR_UNKNOWN_VAR_ID = 9,
  LR_DIMENSION_MISMATCH = 10,
  LR_NUMERICAL_FAILURE = 11,
  LR_EXTERNAL_SOLVER_UNAVAILABLE = 12,
  LR_SOLUTION_PARSE_ERROR = 13,
  LR_INFEASIBLE_REPORTED = 14,
  LR_CONFIG_MISMATCH = 15,
  LR_NON_UNIQUE_ASSIGNMENT = 16,
  LR_GRID_TOO_SMALL = 17,
  LR_ENDPOINT_MISSING = 18,
  LR_ENDPOINT_NOT_UNIQUE = 19,
  LR_BAD_FREQUENCIES = 20,
  LR_K_TOO_LARGE = 21,
  LR_SOLVER_FAILED = 22,
  LR_INTERNAL_ERROR = 99
} lr_status;

typedef struct lr_config lr_config;
typedef struct lr_level lr_level;
typedef struct lr_corpus lr_corpus;
typedef struct lr_repair_result lr_repair_result;

/* Message for the last failed call on this thread; empty after a success. */
LR_API const char* lr_last_error(void);
LR_API const char* lr_status_name(lr_status status);

/* Strings returned through char** are owned by the caller. */
LR_API void lr_string_free(char* text);

/* Game configurations. */
LR_API lr_status lr_config_load(const char* path, lr_config** out);
LR_API lr_status lr_config_parse(const char* text, lr_config** out);
LR_API void lr_config_free(lr_config* config);
LR_API const char* lr_config_name(const lr_config* config);

/* Levels. */
LR_API lr_status lr_level_load(const lr_config* config, const char* path, lr_level** out);
LR_API lr_status lr_level_parse(const lr_config* config, const char* text, lr_level** out);
LR_API lr_level* lr_level_clone(const lr_level* level);
LR_API void lr_level_free(lr_level* level);
LR_API int lr_level_rows(const lr_level* level);
LR_API int lr_level_cols(const lr_level* level);
LR_API int lr_level_equal(const lr_level* a, const lr_level* b);
LR_API lr_status lr_level_render(const lr_config* config, const lr_level* level, char** text);

/* Sets *playable to 1 or 0. `violations` (optional) receives one line per violation. */
LR_API lr_status lr_validate(const lr_config* config, const lr_level* level, int* playable, char** violations);

LR_API lr_status lr_hamming(const lr_level* a, const lr_level* b, long long* out);
LR_API lr_status lr_edit_distance(const lr_config* config, const lr_level* a, const lr_level* b, long long* out);

/* Size of the repair MIP for `level`. */
LR_API lr_status lr_compile_stats(const lr_config* config, const lr_level* level, size_t* variables,
                                  size_t* constraints);

/* Repair. */
typedef enum lr_backend { LR_BACKEND_EMBEDDED = 0, LR_BACKEND_EXTERNAL = 1 } lr_backend;

typedef struct lr_repair_options {
  lr_backend backend;
  const char* external_command; /* NULL or "": use $LEVEL_REPAIR_SOLVER */
  double time_limit_seconds;    /* <= 0: no limit */
  long long node_limit;         /* <= 0: no limit */
  int warm_start;
} lr_repair_options;

LR_API void lr_repair_options_init(lr_repair_options* options);
LR_API lr_status lr_repair(const lr_config* config, const lr_level* input, const lr_repair_options* options,
                           lr_repair_result** out);
LR_API void lr_repair_result_free(lr_repair_result* result);
/* Borrowed; valid until the result is freed. */
LR_API const lr_level* lr_repair_result_level(const lr_repair_result* result);
LR_API const char* lr_repair_result_report(const lr_repair_result* result);
/* "optimal", "limit_reached", ... */
LR_API const char* lr_repair_result_status(const lr_repair_result* result);
LR_API double lr_repair_result_objective(const lr_repair_result* result);
LR_API double lr_repair_result_bound(const lr_repair_result* result);
LR_API double lr_repair_result_seconds(const lr_repair_result* result);
LR_API long long lr_repair_result_nodes(const lr_repair_result* result);

/* Corpora. */
LR_API lr_status lr_corpus_load(const lr_config* config, const char* directory, lr_corpus** out);
LR_API lr_corpus* lr_corpus_new(void);
LR_API lr_status lr_corpus_add(lr_corpus* corpus, const char* name, const lr_level* level);
LR_API void lr_corpus_free(lr_corpus* corpus);
LR_API size_t lr_corpus_size(const lr_corpus* corpus);
LR_API const char* lr_corpus_name(const lr_corpus* corpus, size_t index);
LR_API const lr_level* lr_corpus_level(const lr_corpus* corpus, size_t index);

/* Generation. Frequencies come from `source` when `frequencies` is NULL. */
typedef enum lr_generator_mode { LR_MODE_RANDOM = 0, LR_MODE_CORRUPT = 1 } lr_generator_mode;

typedef struct lr_generate_options {
  lr_generator_mode mode;
  uint64_t seed;
  int count;
  int corrupt_k;
  const double* frequencies; /* by type id */
  size_t num_frequencies;
} lr_generate_options;

LR_API void lr_generate_options_init(lr_generate_options* options);
LR_API lr_status lr_generate(const lr_config* config, const lr_corpus* source, const lr_generate_options* options,
                             lr_corpus** out);

/* Metrics. */
typedef enum lr_kl_direction { LR_KL_GENERATED_TO_REFERENCE = 0, LR_KL_REFERENCE_TO_GENERATED = 1 } lr_kl_direction;

typedef struct lr_metrics_options {
  double epsilon;
  lr_kl_direction direction;
  int jobs;
} lr_metrics_options;

LR_API void lr_metrics_options_init(lr_metrics_options* options);
LR_API lr_status lr_tile_pattern_kl(const lr_corpus* generated, const lr_corpus* reference,
                                    const lr_metrics_options* options, double* out);
/* Text table and JSON lines (either may be NULL). */
LR_API lr_status lr_metrics(const lr_config* config, const lr_corpus* corpus, const lr_corpus* reference,
                            const lr_metrics_options* options, char** table, char** jsonl);

/* Full pipeline report. */
typedef struct lr_experiment_options {
  const char* corpus_dir;
  uint64_t seed;
  int count;
  int corrupt_k;
  int jobs;
  long long node_limit;
  lr_metrics_options metrics;
} lr_experiment_options;

LR_API void lr_experiment_options_init(lr_experiment_options* options);
LR_API lr_status lr_experiment(const lr_config* config, const lr_experiment_options* options, char** report);

#ifdef __cplusplus
}
#endif

#endif
