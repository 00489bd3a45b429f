#ifndef CSPCA_CSPCA_H
#define CSPCA_CSPCA_H

#include <stddef.h>
#include <stdint.h>

#if defined(CSPCA_BUILDING_LIBRARY)
#define CSPCA_API __attribute__((visibility("default")))
#else
#define CSPCA_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Every fallible call returns a status; on failure a thread-local message is
 * available from cspca_last_error() until the next failing call. Output
 * pointers are left untouched on failure. Matrices cross the boundary in
 * column-major order with one column per sample (d x n). */
typedef enum cspca_status {
  CSPCA_OK = 0,
  CSPCA_ERR_INVALID_ARGUMENT = 1,
  CSPCA_ERR_IO = 2,
  CSPCA_ERR_PARSE = 3,
  CSPCA_ERR_DATA = 4,
  CSPCA_ERR_DIMENSION = 5,
  CSPCA_ERR_NUMERICAL = 6,
  CSPCA_ERR_INTERNAL = 7
} cspca_status;

CSPCA_API const char* cspca_version(void);
CSPCA_API const char* cspca_last_error(void);
CSPCA_API const char* cspca_status_name(cspca_status status);
CSPCA_API void cspca_string_free(char* s);

/* ---- data ---- */

typedef struct cspca_matrix cspca_matrix;

CSPCA_API cspca_status cspca_matrix_load_csv(const char* path, int has_header, int samples_as_columns,
                                             cspca_matrix** out);
CSPCA_API cspca_status cspca_matrix_from_values(const double* values, size_t d, size_t n, cspca_matrix** out);
CSPCA_API size_t cspca_matrix_features(const cspca_matrix* m);
CSPCA_API size_t cspca_matrix_samples(const cspca_matrix* m);
CSPCA_API cspca_status cspca_matrix_values(const cspca_matrix* m, double* out);
/* Header name of feature i, or f<i> when the file had none. Owned by m. */
CSPCA_API const char* cspca_matrix_feature_name(const cspca_matrix* m, size_t i);
/* mean_out may be NULL; otherwise it receives d values. */
CSPCA_API cspca_status cspca_matrix_center(const cspca_matrix* m, cspca_matrix** out, double* mean_out);
CSPCA_API cspca_status cspca_matrix_save_csv(const cspca_matrix* m, const char* path, int samples_as_columns);
CSPCA_API void cspca_matrix_free(cspca_matrix* m);

/* Reads integer labels from the first column. With out == NULL only *count is set. */
CSPCA_API cspca_status cspca_labels_load(const char* path, long long* out, size_t capacity, size_t* count);

typedef struct cspca_synthetic_spec {
  size_t n_samples;
  size_t n_informative;
  size_t n_noise;
  size_t n_clusters;
  double cluster_separation;
  double noise_scale;
  double outlier_fraction;
  uint64_t seed;
} cspca_synthetic_spec;

CSPCA_API void cspca_synthetic_spec_default(cspca_synthetic_spec* spec);
/* labels receives n_samples entries, informative n_informative; either may be NULL. */
CSPCA_API cspca_status cspca_generate_synthetic(const cspca_synthetic_spec* spec, cspca_matrix** x, int* labels,
                                                size_t* informative);

/* ---- solver ---- */

typedef enum cspca_init_kind {
  CSPCA_INIT_IDENTITY = 0,
  CSPCA_INIT_SCALED_IDENTITY = 1,
  CSPCA_INIT_CONSTANT = 2,
  CSPCA_INIT_RANDOM = 3
} cspca_init_kind;

typedef struct cspca_solver_config {
  double alpha;
  double beta;
  double epsilon;
  double tol;
  int max_iter;
  cspca_init_kind init;
  double init_value; /* scale for SCALED_IDENTITY and CONSTANT */
  uint64_t init_seed; /* seed for RANDOM */
  double continuation;
  double stationarity_tol;
} cspca_solver_config;

typedef struct cspca_objective {
  double total;
  double loss;
  double l21;
  double trace;
} cspca_objective;

typedef struct cspca_result cspca_result;

CSPCA_API void cspca_solver_config_default(cspca_solver_config* config);
/* Parses identity, diag:<c>, const:<c> or random:<seed> into the config. */
CSPCA_API cspca_status cspca_solver_config_set_init(cspca_solver_config* config, const char* spec);
CSPCA_API cspca_status cspca_solve(const cspca_matrix* x, const cspca_solver_config* config, cspca_result** out);
CSPCA_API cspca_status cspca_objective_eval(const double* w, size_t d, const cspca_matrix* x, double alpha,
                                            double beta, cspca_objective* out);

CSPCA_API size_t cspca_result_dim(const cspca_result* r);
CSPCA_API cspca_status cspca_result_weights(const cspca_result* r, double* out);
CSPCA_API int cspca_result_iterations(const cspca_result* r);
CSPCA_API int cspca_result_converged(const cspca_result* r);
CSPCA_API const char* cspca_result_stop_reason(const cspca_result* r);
CSPCA_API double cspca_result_stationarity(const cspca_result* r);
CSPCA_API size_t cspca_result_objective_count(const cspca_result* r);
CSPCA_API cspca_status cspca_result_objective(const cspca_result* r, size_t i, cspca_objective* out);
CSPCA_API cspca_status cspca_result_trace_json(const cspca_result* r, char** out);
CSPCA_API cspca_status cspca_result_config_json(const cspca_result* r, char** out);
CSPCA_API cspca_status cspca_result_save_trace(const cspca_result* r, const char* path);
CSPCA_API cspca_status cspca_result_save_trace_csv(const cspca_result* r, const char* path);
/* d x d CSV, row i = row i of W. */
CSPCA_API cspca_status cspca_result_save_weights(const cspca_result* r, const char* path);
CSPCA_API void cspca_result_free(cspca_result* r);

/* out receives W^T (x - mean), or W^T x when mean is NULL; all vectors have length d. */
CSPCA_API cspca_status cspca_project(const double* w, size_t d, const double* x, const double* mean, double* out);

/* ---- feature ranking ---- */

typedef struct cspca_ranking cspca_ranking;

CSPCA_API cspca_status cspca_rank_from_result(const cspca_result* r, cspca_ranking** out);
CSPCA_API cspca_status cspca_rank_from_weights(const double* w, size_t d, cspca_ranking** out);
CSPCA_API cspca_status cspca_rank_max_variance(const cspca_matrix* x, cspca_ranking** out);
CSPCA_API cspca_status cspca_ranking_load(const char* path, cspca_ranking** out);
CSPCA_API size_t cspca_ranking_size(const cspca_ranking* r);
CSPCA_API const char* cspca_ranking_tie_rule(const cspca_ranking* r);
CSPCA_API cspca_status cspca_ranking_order(const cspca_ranking* r, size_t* out);
CSPCA_API cspca_status cspca_ranking_scores(const cspca_ranking* r, double* out);
CSPCA_API cspca_status cspca_ranking_select(const cspca_ranking* r, size_t k, size_t* out);
CSPCA_API cspca_status cspca_ranking_save(const cspca_ranking* r, const char* path);
/* names may be NULL; limit 0 writes every feature. */
CSPCA_API cspca_status cspca_ranking_save_csv(const cspca_ranking* r, const cspca_matrix* names, size_t limit,
                                              const char* path);
CSPCA_API void cspca_ranking_free(cspca_ranking* r);

CSPCA_API cspca_status cspca_matrix_restrict(const cspca_matrix* x, const size_t* selected, size_t k,
                                             cspca_matrix** out);

/* ---- evaluation ---- */

typedef struct cspca_eval_report {
  double acc_mean;
  double acc_std;
  double nmi_mean;
  double nmi_std;
  int runs;
  uint64_t base_seed;
} cspca_eval_report;

CSPCA_API cspca_status cspca_kmeans(const cspca_matrix* x, int c, uint64_t seed, int max_iter, int* labels_out);
/* Label ids are arbitrary integers; both vectors have n entries. */
CSPCA_API cspca_status cspca_accuracy(const long long* pred, const long long* truth, size_t n, double* out);
CSPCA_API cspca_status cspca_nmi(const long long* pred, const long long* truth, size_t n, double* out);
CSPCA_API cspca_status cspca_evaluate_selection(const cspca_matrix* x, const size_t* selected, size_t k,
                                                const long long* truth, size_t n, int c, int runs,
                                                uint64_t base_seed, cspca_eval_report* out);
CSPCA_API cspca_status cspca_eval_report_save(const cspca_eval_report* report, const char* path);

/* ---- verification ---- */

typedef struct cspca_verify_options {
  int trials;
  uint64_t seed;
  int max_dim;
  int inject_fault;
} cspca_verify_options;

typedef struct cspca_verify_report cspca_verify_report;

CSPCA_API void cspca_verify_options_default(cspca_verify_options* options);
CSPCA_API cspca_status cspca_verify(const cspca_verify_options* options, cspca_verify_report** out);
CSPCA_API size_t cspca_verify_count(const cspca_verify_report* r);
CSPCA_API const char* cspca_verify_name(const cspca_verify_report* r, size_t i);
CSPCA_API int cspca_verify_passed(const cspca_verify_report* r, size_t i);
CSPCA_API int cspca_verify_instances(const cspca_verify_report* r, size_t i);
CSPCA_API const char* cspca_verify_detail(const cspca_verify_report* r, size_t i);
CSPCA_API const char* cspca_verify_replay(const cspca_verify_report* r, size_t i);
CSPCA_API void cspca_verify_free(cspca_verify_report* r);

/* ---- files ---- */

/* Writes text through a temporary file and rename. */
CSPCA_API cspca_status cspca_write_text(const char* path, const char* text);

#ifdef __cplusplus
}
#endif

#endif
