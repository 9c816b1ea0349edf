#ifndef ARNOLDI_AGG_H
#define ARNOLDI_AGG_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdbool.h>
#include <stddef.h>

/**
 * Result code of every fallible call.
 */
typedef enum ArnaggStatus {
  ARNAGG_STATUS_OK = 0,
  ARNAGG_STATUS_NULL_POINTER = 1,
  ARNAGG_STATUS_INVALID_ARGUMENT = 2,
  ARNAGG_STATUS_DIMENSION_MISMATCH = 3,
  ARNAGG_STATUS_INVALID_MATRIX = 4,
  ARNAGG_STATUS_INVALID_DISTRIBUTION = 5,
  ARNAGG_STATUS_STATE_SPACE_OVERFLOW = 6,
  ARNAGG_STATUS_EIGEN_SOLVER = 7,
  ARNAGG_STATUS_IO = 8,
  ARNAGG_STATUS_PARSE = 9,
  ARNAGG_STATUS_PANIC = 10,
} ArnaggStatus;

/**
 * Why an adaptive run stopped.
 */
typedef enum ArnaggStopReason {
  ARNAGG_STOP_REASON_CRITERION_MET = 0,
  ARNAGG_STOP_REASON_INVARIANT_SUBSPACE = 1,
  ARNAGG_STOP_REASON_MAX_DIMENSION = 2,
} ArnaggStopReason;

/**
 * Opaque Arnoldi aggregation.
 */
typedef struct ArnaggAggregation ArnaggAggregation;

/**
 * Opaque row-stochastic sparse matrix.
 */
typedef struct ArnaggMatrix ArnaggMatrix;

/**
 * Summary of an adaptive run, filled by [`arnagg_run_adaptive`].
 */
typedef struct ArnaggRunInfo {
  enum ArnaggStopReason stop_reason;
  size_t dimension;
  /**
   * NaN when no real eigenvector was available at the final dimension.
   */
  double criterion;
  double total_seconds;
  double criterion_seconds;
} ArnaggRunInfo;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null after a success.
 *
 * The pointer stays valid until the next call into this library on the same thread.
 */
const char *arnagg_last_error(void);

/**
 * Static, NUL-terminated name of a status code.
 */
const char *arnagg_status_name(enum ArnaggStatus status);

/**
 * Builds a row-stochastic matrix from CSR arrays (`row_offsets` has `n + 1` entries).
 *
 * # Safety
 * The arrays must be valid for the stated lengths; `out` must be writable.
 */
enum ArnaggStatus arnagg_matrix_from_csr(size_t n,
                                         const size_t *row_offsets,
                                         const size_t *col_indices,
                                         const double *values,
                                         size_t nnz,
                                         struct ArnaggMatrix **out);

/**
 * DTMC of a catalog model (generators are uniformised; `rate <= 0` selects the catalog rate).
 *
 * `initial_state`, when non-null, receives the index of the model's initial state.
 *
 * # Safety
 * `name` must be a NUL-terminated string; the pointers must be writable or null.
 */
enum ArnaggStatus arnagg_matrix_from_model(const char *name,
                                           double rate,
                                           struct ArnaggMatrix **out,
                                           size_t *initial_state);

/**
 * Number of states, or 0 for a null handle.
 *
 * # Safety
 * `m` must be null or a live matrix handle.
 */
size_t arnagg_matrix_size(const struct ArnaggMatrix *m);

/**
 * # Safety
 * `m` must be null or a handle not yet freed.
 */
void arnagg_matrix_free(struct ArnaggMatrix *m);

/**
 * `p_k = p₀P^k` by repeated products.
 *
 * # Safety
 * `p0` and `out` must be valid for `n` entries.
 */
enum ArnaggStatus arnagg_transient_naive(const struct ArnaggMatrix *m,
                                         const double *p0,
                                         size_t n,
                                         size_t k,
                                         double *out);

/**
 * Arnoldi aggregation of fixed dimension `j`.
 *
 * # Safety
 * `p0` must be valid for `n` entries and `out` writable.
 */
enum ArnaggStatus arnagg_aggregation_build(const struct ArnaggMatrix *m,
                                           const double *p0,
                                           size_t n,
                                           size_t j,
                                           struct ArnaggAggregation **out);

/**
 * Expands until the criterion value drops to `epsilon`.
 *
 * `check_every = 0` selects the default cadence and `max_dimension = 0` means no cap.
 * Reaching the cap is not an error: inspect `info.stop_reason`.
 *
 * # Safety
 * `p0` must be valid for `n` entries; `out` and `info` writable (`info` may be null).
 */
enum ArnaggStatus arnagg_run_adaptive(const struct ArnaggMatrix *m,
                                      const double *p0,
                                      size_t n,
                                      double epsilon,
                                      size_t check_every,
                                      size_t max_dimension,
                                      struct ArnaggAggregation **out,
                                      struct ArnaggRunInfo *info);

/**
 * Dimension `j`, or 0 for a null handle.
 *
 * # Safety
 * `a` must be null or a live aggregation handle.
 */
size_t arnagg_aggregation_dimension(const struct ArnaggAggregation *a);

/**
 * Size `n` of the original chain, or 0 for a null handle.
 *
 * # Safety
 * `a` must be null or a live aggregation handle.
 */
size_t arnagg_aggregation_states(const struct ArnaggAggregation *a);

/**
 * Whether the Krylov space was invariant (the aggregation is exact).
 *
 * # Safety
 * `a` must be null or a live aggregation handle.
 */
bool arnagg_aggregation_is_invariant(const struct ArnaggAggregation *a);

/**
 * Approximate transient distribution `p̃_k` lifted to the full state space.
 *
 * # Safety
 * `out` must be valid for `n` writes, `n` being the size of the chain.
 */
enum ArnaggStatus arnagg_aggregation_transient(const struct ArnaggAggregation *a,
                                               size_t k,
                                               double *out,
                                               size_t n);

/**
 * `‖p̃_k − p_k‖₁` via the closed form in the boundary pair.
 *
 * # Safety
 * Handles must be live; `out` writable.
 */
enum ArnaggStatus arnagg_aggregation_error(const struct ArnaggAggregation *a,
                                           const struct ArnaggMatrix *m,
                                           size_t k,
                                           double *out);

/**
 * Writes the aggregation directory (`H.mtx`, `Q.mtx`, `pi0.txt`, `meta.json`).
 *
 * # Safety
 * `a` must be live and `dir` a NUL-terminated path.
 */
enum ArnaggStatus arnagg_aggregation_save(const struct ArnaggAggregation *a, const char *dir);

/**
 * Reads a directory written by [`arnagg_aggregation_save`].
 *
 * # Safety
 * `dir` must be a NUL-terminated path and `out` writable.
 */
enum ArnaggStatus arnagg_aggregation_load(const char *dir, struct ArnaggAggregation **out);

/**
 * # Safety
 * `a` must be null or a handle not yet freed.
 */
void arnagg_aggregation_free(struct ArnaggAggregation *a);

/**
 * Library version as a static NUL-terminated string.
 */
const char *arnagg_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ARNOLDI_AGG_H */
