#ifndef JNR_H
#define JNR_H

/* Generated by cbindgen from crates/ffi/src. Do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

/**
 * Result code of every fallible call.
 */
typedef enum JnrStatus {
  JNR_STATUS_OK = 0,
  JNR_STATUS_NULL_POINTER = 1,
  JNR_STATUS_INVALID_ARGUMENT = 2,
  JNR_STATUS_NON_HERMITIAN = 3,
  JNR_STATUS_DIMENSION_MISMATCH = 4,
  JNR_STATUS_PARSE = 5,
  JNR_STATUS_NUMERICAL = 6,
  JNR_STATUS_IO = 7,
  JNR_STATUS_PANIC = 8,
} JnrStatus;

/**
 * Direction sampling scheme.
 */
typedef enum JnrStrategy {
  JNR_STRATEGY_GRID2D = 0,
  JNR_STRATEGY_FIBONACCI3D = 1,
  JNR_STRATEGY_SEEDED_UNIFORM = 2,
} JnrStrategy;

/**
 * Family of a qutrit classification.
 */
typedef enum JnrFamily {
  JNR_FAMILY_K2 = 0,
  JNR_FAMILY_K3 = 1,
  JNR_FAMILY_POLYTOPE_DEGENERATE = 2,
} JnrFamily;

/**
 * Opaque ordered list of operators sharing one dimension.
 */
typedef struct JnrObservableSet JnrObservableSet;

/**
 * Opaque Hermitian operator.
 */
typedef struct JnrOperator JnrOperator;

/**
 * Opaque list of boundary points, stored row-major.
 */
typedef struct JnrPointCloud JnrPointCloud;

/**
 * Qutrit classification summary.
 */
typedef struct JnrClassification {
  enum JnrFamily family;
  /**
   * Class index 0..=3 for `K2`, -1 otherwise.
   */
  int32_t k2_class;
  /**
   * Number of ellipses.
   */
  size_t e;
  /**
   * Number of segments.
   */
  size_t s;
  bool infinite_segments;
  size_t flat_parts;
} JnrClassification;

/**
 * Two-sided bound on the minimal sum of variances.
 */
typedef struct JnrBracket {
  double lower;
  double upper;
  size_t num_directions;
} JnrBracket;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copy of the last error message on this thread, or NULL when the last call
 * succeeded. Release it with [`jnr_string_free`].
 */
char *jnr_last_error_message(void);

/**
 * Releases a string returned by this library.
 *
 * # Safety
 * `s` must be NULL or a pointer returned by this library and not yet freed.
 */
void jnr_string_free(char *s);

/**
 * Builds a `dim x dim` operator from row-major real and imaginary parts.
 * `im` may be NULL for a real symmetric matrix.
 *
 * # Safety
 * `re` (and `im` when non-NULL) must point to `dim * dim` doubles; `out`
 * must be writable.
 */
enum JnrStatus jnr_operator_new(size_t dim,
                                const double *re,
                                const double *im,
                                struct JnrOperator **out_op);

/**
 * Parses an operator from its JSON form `{"d": .., "re": [[..]], "im": [[..]]}`.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out_op` must be writable.
 */
enum JnrStatus jnr_operator_from_json(const char *json, struct JnrOperator **out_op);

/**
 * Serializes an operator to JSON. Release the string with [`jnr_string_free`].
 *
 * # Safety
 * `op` must be a live operator handle; `out_json` must be writable.
 */
enum JnrStatus jnr_operator_to_json(const struct JnrOperator *op, char **out_json);

/**
 * Dimension of the operator, or 0 for NULL.
 *
 * # Safety
 * `op` must be NULL or a live operator handle.
 */
size_t jnr_operator_dim(const struct JnrOperator *op);

/**
 * # Safety
 * `op` must be NULL or a handle from this library not yet freed.
 */
void jnr_operator_free(struct JnrOperator *op);

/**
 * Builds an observable set from `k` operators; the operators are copied.
 *
 * # Safety
 * `ops` must point to `k` live operator handles; `out_set` must be writable.
 */
enum JnrStatus jnr_set_new(const struct JnrOperator *const *ops,
                           size_t k,
                           struct JnrObservableSet **out_set);

/**
 * Number of operators, or 0 for NULL.
 *
 * # Safety
 * `set` must be NULL or a live set handle.
 */
size_t jnr_set_k(const struct JnrObservableSet *set);

/**
 * Hilbert-space dimension, or 0 for NULL.
 *
 * # Safety
 * `set` must be NULL or a live set handle.
 */
size_t jnr_set_dim(const struct JnrObservableSet *set);

/**
 * # Safety
 * `set` must be NULL or a handle from this library not yet freed.
 */
void jnr_set_free(struct JnrObservableSet *set);

/**
 * `lambda_max(n . F)` and the multiplicity of the top level.
 *
 * # Safety
 * `n` must point to `k` doubles; outputs must be writable or NULL.
 */
enum JnrStatus jnr_support_function(const struct JnrObservableSet *set,
                                    const double *n,
                                    size_t k,
                                    double gap_tol,
                                    double *out_value,
                                    size_t *out_multiplicity);

/**
 * Boundary points for `num_directions` sampled directions. Degenerate
 * directions may contribute several points.
 *
 * # Safety
 * `set` must be a live set handle; `out_cloud` must be writable.
 */
enum JnrStatus jnr_boundary_points(const struct JnrObservableSet *set,
                                   size_t num_directions,
                                   enum JnrStrategy strategy,
                                   uint64_t seed,
                                   double gap_tol,
                                   struct JnrPointCloud **out_cloud);

/**
 * Number of points, or 0 for NULL.
 *
 * # Safety
 * `cloud` must be NULL or a live handle.
 */
size_t jnr_points_len(const struct JnrPointCloud *cloud);

/**
 * Coordinates per point, or 0 for NULL.
 *
 * # Safety
 * `cloud` must be NULL or a live handle.
 */
size_t jnr_points_k(const struct JnrPointCloud *cloud);

/**
 * Row-major `len x k` point coordinates, valid until the cloud is freed.
 *
 * # Safety
 * `cloud` must be NULL or a live handle.
 */
const double *jnr_points_coords(const struct JnrPointCloud *cloud);

/**
 * Row-major `len x k` supporting directions, valid until the cloud is freed.
 *
 * # Safety
 * `cloud` must be NULL or a live handle.
 */
const double *jnr_points_directions(const struct JnrPointCloud *cloud);

/**
 * Support value per point, valid until the cloud is freed.
 *
 * # Safety
 * `cloud` must be NULL or a live handle.
 */
const double *jnr_points_supports(const struct JnrPointCloud *cloud);

/**
 * Top-level multiplicity per point, valid until the cloud is freed.
 *
 * # Safety
 * `cloud` must be NULL or a live handle.
 */
const size_t *jnr_points_multiplicities(const struct JnrPointCloud *cloud);

/**
 * # Safety
 * `cloud` must be NULL or a handle from this library not yet freed.
 */
void jnr_points_free(struct JnrPointCloud *cloud);

/**
 * Flat-part class of two 3x3 operators.
 *
 * # Safety
 * Handles must be live; `out_class` must be writable.
 */
enum JnrStatus jnr_classify_k2(const struct JnrOperator *x,
                               const struct JnrOperator *y,
                               struct JnrClassification *out_class);

/**
 * Ellipse and segment counts of three 3x3 operators.
 *
 * # Safety
 * Handles must be live; `out_class` must be writable.
 */
enum JnrStatus jnr_classify_k3(const struct JnrOperator *f1,
                               const struct JnrOperator *f2,
                               const struct JnrOperator *f3,
                               struct JnrClassification *out_class);

/**
 * Bracket on `min (Var X + Var Y)` over pure states.
 *
 * # Safety
 * Handles must be live; `out_bracket` must be writable.
 */
enum JnrStatus jnr_variance_sum_bounds(const struct JnrOperator *x,
                                       const struct JnrOperator *y,
                                       size_t num_directions,
                                       double gap_tol,
                                       uint64_t seed,
                                       struct JnrBracket *out_bracket);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* JNR_H */
