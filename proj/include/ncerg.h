/* C API for the noncommutative ergodic-average laboratory.
 *
 * All objects are opaque handles created from JSON descriptions and released
 * with their matching _free function. Every call returns a status code;
 * functions producing output do so through out-parameters. On failure the
 * thread-local message retrieved by ncerg_last_error() describes the problem.
 *
 * Strings returned through char** out-parameters are heap-allocated and must
 * be released with ncerg_string_free().
 */
#ifndef NCERG_H
#define NCERG_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ncerg_status {
  NCERG_OK = 0,
  NCERG_E_VALIDATION = 1, /* malformed or inconsistent input */
  NCERG_E_RUNTIME = 2,    /* I/O failure or numerical breakdown */
  NCERG_E_CHECK = 3       /* the requested verification ran and failed */
} ncerg_status;

typedef struct ncerg_algebra ncerg_algebra;
typedef struct ncerg_element ncerg_element;
typedef struct ncerg_operator ncerg_operator;
typedef struct ncerg_sequence ncerg_sequence;
typedef struct ncerg_weights ncerg_weights;

const char* ncerg_version(void);
const char* ncerg_last_error(void);
void ncerg_string_free(char* s);

/* ---- algebras ---- */
ncerg_status ncerg_algebra_from_json(const char* json, ncerg_algebra** out);
void ncerg_algebra_free(ncerg_algebra* a);
ncerg_status ncerg_algebra_total_dim(const ncerg_algebra* a, size_t* out);
ncerg_status ncerg_algebra_trace_of_identity(const ncerg_algebra* a, double* out);

/* ---- elements ---- */
ncerg_status ncerg_element_from_json(const ncerg_algebra* a, const char* json,
                                     ncerg_element** out);
ncerg_status ncerg_element_to_json(const ncerg_element* x, char** out_json);
void ncerg_element_free(ncerg_element* x);
/* seeded Ginibre element normalized to ||x||_p = norm_target */
ncerg_status ncerg_element_random(const ncerg_algebra* a, uint64_t seed, double p,
                                  double norm_target, ncerg_element** out);
ncerg_status ncerg_element_trace(const ncerg_element* x, double* re, double* im);
/* p >= 1; pass INFINITY for the operator norm */
ncerg_status ncerg_element_schatten_norm(const ncerg_element* x, double p, double* out);

/* ---- Dunford-Schwartz operators ---- */
ncerg_status ncerg_operator_from_json(const ncerg_algebra* a, const char* json,
                                      ncerg_operator** out);
void ncerg_operator_free(ncerg_operator* op);
ncerg_status ncerg_operator_apply(const ncerg_operator* op, const ncerg_element* x,
                                  ncerg_element** out);
/* projection of x onto the fixed space of the operator */
ncerg_status ncerg_operator_fixed_space_apply(const ncerg_operator* op, const ncerg_element* x,
                                              ncerg_element** out);

/* ---- subsequences ---- */
ncerg_status ncerg_sequence_from_json(const char* json, ncerg_sequence** out);
void ncerg_sequence_free(ncerg_sequence* s);
/* fills out[0..n-1] with k_0 < ... < k_{n-1} */
ncerg_status ncerg_sequence_prefix(const ncerg_sequence* s, size_t n, uint64_t* out);
ncerg_status ncerg_sequence_partial_density(const ncerg_sequence* s, uint64_t n, double* out);

/* ---- weights ---- */
ncerg_status ncerg_weights_from_json(const char* json, ncerg_weights** out);
void ncerg_weights_free(ncerg_weights* w);
ncerg_status ncerg_weights_sup_bound(const ncerg_weights* w, double* out);
/* fills re[0..n-1], im[0..n-1] */
ncerg_status ncerg_weights_prefix(const ncerg_weights* w, size_t n, double* re, double* im);

/* ---- averages ----
 * M_n of the selected family at the requested checkpoints (strictly
 * increasing); returns a JSON array of serialized elements. beta and k may be
 * NULL for the unweighted / full-sequence defaults. */
ncerg_status ncerg_average_checkpoints(const ncerg_operator* op, const ncerg_element* x,
                                       const ncerg_weights* beta, const ncerg_sequence* k,
                                       const uint64_t* checkpoints, size_t count,
                                       char** out_json);

/* ---- experiment-level entry points (JSON in / JSON out) ---- */

/* Writes manifest.json, averages.csv, witness.csv and report.json under
 * out_dir. seed_override, when non-NULL, replaces the config seed. */
ncerg_status ncerg_run_experiment(const char* config_json, const char* out_dir,
                                  const uint64_t* seed_override, char** report_json);

/* recipe_file_json = {"algebra":..., "operator":...}. When use_scaling_hook is
 * nonzero the operator entry is ignored and the map x -> hook_factor * x is
 * verified instead. Returns NCERG_E_CHECK when verification fails (the report
 * is still produced). */
ncerg_status ncerg_check_ds(const char* recipe_file_json, int use_scaling_hook,
                            double hook_factor, uint64_t samples, double tol, uint64_t seed,
                            char** report_json);

/* CSV table with columns n, k, N_I, partial_density, sup_ratio. */
ncerg_status ncerg_gen_seq(const char* sequence_json, uint64_t n, char** csv_out);

/* Returns NCERG_E_CHECK when a sample misses its witness bound. */
ncerg_status ncerg_probe_buem(const char* config_json, char** report_json);

/* Randomized sweep of the transfer identities and the deleted-terms gap
 * bound; NCERG_E_CHECK when a residual exceeds 1e-10 * (1 + ||x||_inf). */
ncerg_status ncerg_check_identities(uint64_t seed, uint64_t instances, char** report_json);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* NCERG_H */
