#ifndef LLT_LLT_H_
#define LLT_LLT_H_

/*
 * C interface to the lattice local-limit toolkit.
 *
 * Objects are opaque handles released with their *_free function. Every
 * fallible call returns an llt_status; on failure llt_last_error() describes
 * the error for the calling thread until its next failing call. Vectors are
 * plain arrays of length d, matrices are row-major.
 */

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define LLT_API __declspec(dllexport)
#else
#define LLT_API __attribute__((visibility("default")))
#endif

typedef enum llt_status {
  LLT_OK = 0,
  LLT_INVALID_ARGUMENT = 1,
  LLT_NEGATIVE_MASS = 2,
  LLT_NOT_NORMALIZED = 3,
  LLT_EMPTY_SUPPORT = 4,
  LLT_NONPOSITIVE_SCALE = 5,
  LLT_ZERO_VARIANCE = 6,
  LLT_SUPPORT_OVERFLOW = 7,
  LLT_REGIME_VIOLATION = 8,
  LLT_SINGULAR_MATRIX = 9,
  LLT_DIMENSION_UNSUPPORTED = 10,
  LLT_TOLERANCE_UNREACHABLE = 11,
  LLT_ZERO_DENSITY_ON_BOX = 12,
  LLT_EMPTY_REGION = 13,
  LLT_DENSITY_NOT_BOUNDED_BELOW = 14,
  LLT_MIN_LENGTH_EXCEEDS_BOX = 15,
  LLT_NOT_ENOUGH_GRID_POINTS = 16,
  LLT_BOUND_DEGENERATE = 17,
  LLT_CONFIG_INVALID = 18,
  LLT_IO = 19,
  LLT_INTERNAL = 100
} llt_status;

typedef struct llt_pmf llt_pmf;
typedef struct llt_density llt_density;

LLT_API const char* llt_last_error(void);
LLT_API const char* llt_status_name(llt_status status);
/* Releases strings returned through char** out-parameters. */
LLT_API void llt_string_free(char* s);

/* ---- lattice pmfs ---- */

/* Masses are row-major over the extents, last axis fastest; they are
 * renormalized and must sum to 1 within 1e-9. */
LLT_API llt_status llt_pmf_create(size_t d, const double* offset, const double* step,
                                  const int64_t* index_lo, const size_t* extents,
                                  const double* masses, llt_pmf** out);
/* {"family":"iid","base":{...},"n":N} or
 * {"family":"cw","sizes":[...],"coupling":{"beta":b}|{"J":[[...]]}}. */
LLT_API llt_status llt_pmf_from_model_json(const char* model_json, llt_pmf** out);
LLT_API llt_status llt_pmf_read_csv(const char* csv_path, const char* meta_path, llt_pmf** out);
LLT_API llt_status llt_pmf_write_csv(const llt_pmf* pmf, const char* csv_path,
                                     const char* meta_path);
LLT_API void llt_pmf_free(llt_pmf* pmf);

LLT_API size_t llt_pmf_dim(const llt_pmf* pmf);
LLT_API size_t llt_pmf_size(const llt_pmf* pmf);
LLT_API llt_status llt_pmf_step(const llt_pmf* pmf, double* step);
LLT_API llt_status llt_pmf_point_mass(const llt_pmf* pmf, const double* x, double* out);
/* Inclusivity arrays may be NULL (closed). */
LLT_API llt_status llt_pmf_box_mass(const llt_pmf* pmf, const double* lower, const double* upper,
                                    const int* lower_inclusive, const int* upper_inclusive,
                                    double* out);

/* ---- reference densities ---- */

LLT_API llt_status llt_density_gaussian(size_t d, const double* covariance, llt_density** out);
LLT_API llt_status llt_density_standard_normal(llt_density** out);
LLT_API llt_status llt_density_irwin_hall(int n, llt_density** out);
/* Limit density of a model config: N(0,1) for iid, N(0,C) for cw. */
LLT_API llt_status llt_density_from_model_json(const char* model_json, llt_density** out);
LLT_API void llt_density_free(llt_density* density);

LLT_API size_t llt_density_dim(const llt_density* density);
LLT_API llt_status llt_density_at(const llt_density* density, const double* x, double* out);
LLT_API llt_status llt_density_box_prob(const llt_density* density, const double* lower,
                                        const double* upper, double tol, double* out);
LLT_API llt_status llt_density_extremes(const llt_density* density, const double* lower,
                                        const double* upper, double* f_min, double* f_max);

/* ---- statistics ---- */

/* argmax (d entries) may be NULL. region may be NULL for the default window. */
LLT_API llt_status llt_pointwise_stat(const llt_pmf* pmf, const llt_density* density,
                                      const double* region_lower, const double* region_upper,
                                      double* value, double* argmax);
LLT_API llt_status llt_step1_stat(const llt_pmf* pmf, const llt_density* density,
                                  const double* lower, const double* upper, double* value,
                                  double* argmax);

typedef struct llt_sup_options {
  int slide_offsets;   /* default 8 */
  double box_tolerance; /* default 1e-12 */
  unsigned threads;    /* default 1 */
} llt_sup_options;

LLT_API llt_sup_options llt_sup_options_default(void);

typedef struct llt_sup_result {
  double value;
  double ratio_at_witness;
  int64_t candidate_count;
  /* Witness box; only the first d entries are used. */
  double witness_lower[3];
  double witness_upper[3];
  int witness_lower_inclusive[3];
  int witness_upper_inclusive[3];
} llt_sup_result;

/* warnings may be NULL; otherwise receives a newline-separated string (or
 * NULL when there are none) to release with llt_string_free. */
LLT_API llt_status llt_sup_ratio(const llt_pmf* pmf, const llt_density* density,
                                 const double* ab_lower, const double* ab_upper, const double* m,
                                 const llt_sup_options* options, llt_sup_result* out,
                                 char** warnings);
LLT_API llt_status llt_mu_vs_histogram(const llt_pmf* pmf, const llt_density* density,
                                       const double* ab_lower, const double* ab_upper,
                                       const double* m, const llt_sup_options* options,
                                       llt_sup_result* out);
/* m may be NULL (one cell along the other axes). Box written to lower/upper. */
LLT_API llt_status llt_counterexample(const llt_pmf* pmf, const llt_density* density,
                                      const double* ab_lower, const double* ab_upper, int l,
                                      size_t dim_star, const double* m, double* ratio,
                                      double* lower, double* upper);
LLT_API llt_status llt_step3_bound(double f_min, double f_max, size_t d, const double* m,
                                   const double* w, double* out);
LLT_API llt_status llt_continuous_sup_ratio(const llt_density* density_n,
                                            const llt_density* density_limit,
                                            const double* ab_lower, const double* ab_upper,
                                            double* out);

/* ---- studies ---- */

LLT_API llt_status llt_study_validate(const char* config_json);
/* out_path NULL uses the config's "output" field. */
LLT_API llt_status llt_study_run(const char* config_json, const char* out_path, unsigned threads);
LLT_API llt_status llt_study_pointwise(const char* config_json, const char* out_path);
LLT_API llt_status llt_study_sup(const char* config_json, const char* out_path, unsigned threads);

#ifdef __cplusplus
}
#endif

#endif /* LLT_LLT_H_ */
