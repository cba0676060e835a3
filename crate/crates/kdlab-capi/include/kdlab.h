/* C interface to kdlab: Kirkwood-Dirac nonclassicality, complete basis
 * incompatibility, support-uncertainty diagrams, and unitary perturbation.
 *
 * Every fallible call returns a KdlabStatus; kdlab_last_error_message()
 * holds the detail text for the most recent failure on this thread. */

#ifndef KDLAB_H
#define KDLAB_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Witness outcome: 1 when nonclassicality is certified, 0 when the rules
 * are inconclusive.
 */
#define KDLAB_WITNESS_INCONCLUSIVE 0

#define KDLAB_WITNESS_NONCLASSICAL 1

/**
 * Witness rules, for the `rule` out-parameter of kdlab_witness.
 */
#define KDLAB_RULE_NONE 0

#define KDLAB_RULE_SPARSE_ZEROS 1

#define KDLAB_RULE_SUPPORT_OVER_ZEROS 2

#define KDLAB_RULE_THREE_HALVES_SUPPORT 3

/**
 * Result of every fallible call. Zero is success; anything else is a
 * failure whose detail text is available from kdlab_last_error_message().
 */
typedef enum KdlabStatus {
  KDLAB_STATUS_OK = 0,
  /**
   * A required pointer argument was null.
   */
  KDLAB_STATUS_NULL_ARGUMENT = 1,
  /**
   * A string argument was not valid UTF-8.
   */
  KDLAB_STATUS_INVALID_UTF8 = 2,
  /**
   * Malformed JSON or an unknown generator name.
   */
  KDLAB_STATUS_PARSE_ERROR = 3,
  /**
   * Dimensions of the arguments do not line up.
   */
  KDLAB_STATUS_DIMENSION_ERROR = 4,
  /**
   * An index was out of range.
   */
  KDLAB_STATUS_BOUNDS_ERROR = 5,
  /**
   * Input violated a documented precondition (non-unitary matrix,
   * non-normalized state, bad tolerance, ...).
   */
  KDLAB_STATUS_VALIDATION_ERROR = 6,
  /**
   * A combinatorial size cap was exceeded.
   */
  KDLAB_STATUS_SIZE_CAP_ERROR = 7,
  /**
   * A check was invoked on input that does not satisfy its hypotheses.
   */
  KDLAB_STATUS_INAPPLICABLE = 8,
  /**
   * Requested a state from a zero-dimensional subspace.
   */
  KDLAB_STATUS_NO_STATE = 9,
  /**
   * A support profile could not be realized exactly.
   */
  KDLAB_STATUS_DEGENERATE_SUPPORT = 10,
  /**
   * A numerical procedure failed.
   */
  KDLAB_STATUS_NUMERICAL_ERROR = 11,
  /**
   * An iterative schedule ran out of budget.
   */
  KDLAB_STATUS_CONVERGENCE_ERROR = 12,
  /**
   * Filesystem failure.
   */
  KDLAB_STATUS_IO_ERROR = 13,
  /**
   * An internal invariant was violated (library bug).
   */
  KDLAB_STATUS_INTERNAL_PANIC = 14,
} KdlabStatus;

/**
 * Opaque handle to a validated transition matrix between two bases.
 */
typedef struct KdlabMatrix KdlabMatrix;

/**
 * Opaque handle to a normalized pure state.
 */
typedef struct KdlabState KdlabState;

/**
 * Entry-magnitude statistics of a transition matrix.
 */
typedef struct KdlabBasisStats {
  /**
   * Smallest entry magnitude.
   */
  double min_mag;
  /**
   * Largest entry magnitude.
   */
  double max_mag;
  /**
   * Number of entries treated as zero.
   */
  size_t zeros;
  /**
   * Largest total zero count over any two distinct rows.
   */
  size_t zeros_two_rows;
  /**
   * Largest total zero count over any two distinct columns.
   */
  size_t zeros_two_cols;
} KdlabBasisStats;

/**
 * The four-level incompatibility hierarchy of a basis pair. Index masks
 * use bit i-1 for basis vector i.
 */
typedef struct KdlabHierarchy {
  /**
   * No minor of the transition matrix vanishes.
   */
  bool coinc;
  /**
   * No pair of subset projectors commutes.
   */
  bool all_projectors_noncommute;
  /**
   * Every transition magnitude is positive.
   */
  bool m_positive;
  /**
   * Every transition magnitude is below one.
   */
  bool max_below_one;
  /**
   * Whether a commuting projector pair was found (sets the masks).
   */
  bool has_commuting_pair;
  /**
   * Row subset S of the first commuting pair, as a bit mask.
   */
  uint64_t commuting_s_mask;
  /**
   * Column subset T of the first commuting pair, as a bit mask.
   */
  uint64_t commuting_t_mask;
} KdlabHierarchy;

/**
 * Support profile of a state with respect to the two bases.
 */
typedef struct KdlabSupport {
  /**
   * Number of nonvanishing components in basis A.
   */
  size_t n_a;
  /**
   * Number of nonvanishing components in basis B.
   */
  size_t n_b;
  /**
   * Support of the state in basis A, as a bit mask.
   */
  uint64_t s_mask;
  /**
   * Support of the state in basis B, as a bit mask.
   */
  uint64_t t_mask;
} KdlabSupport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Parse a matrix from JSON of the form {"d": n, "entries": [[re, im], ...]}
 * (row-major). Tolerances at or below zero select the defaults (1e-9
 * absolute zero threshold, 1e-10 relative rank threshold). On success
 * *out_matrix is owned by the caller.
 */
enum KdlabStatus kdlab_matrix_parse_json(const char *json,
                                         double zero_tol,
                                         double rank_tol,
                                         struct KdlabMatrix **out_matrix);

/**
 * Construct a catalog matrix: "dft" (uses `d`), "tao", "spin1",
 * "mub4" (uses the unimodular parameter s_re + i s_im; pass 1, 0 for the
 * real member), "u6", "u6p". Other parameters are ignored per name.
 */
enum KdlabStatus kdlab_matrix_gen(const char *name,
                                  size_t d,
                                  double s_re,
                                  double s_im,
                                  struct KdlabMatrix **out_matrix);

/**
 * Release a matrix handle. Null is a no-op.
 */
void kdlab_matrix_free(struct KdlabMatrix *matrix);

/**
 * Dimension of the matrix; 0 when the handle is null.
 */
size_t kdlab_matrix_dim(const struct KdlabMatrix *matrix);

/**
 * Read one entry (0-based indices).
 */
enum KdlabStatus kdlab_matrix_entry(const struct KdlabMatrix *matrix,
                                    size_t row,
                                    size_t col,
                                    double *out_re,
                                    double *out_im);

/**
 * Serialize the matrix to JSON. The string is owned by the caller
 * (release with kdlab_string_free).
 */
enum KdlabStatus kdlab_matrix_to_json(const struct KdlabMatrix *matrix, char **out_json);

/**
 * Entry-magnitude statistics.
 */
enum KdlabStatus kdlab_matrix_stats(const struct KdlabMatrix *matrix,
                                    struct KdlabBasisStats *out_stats);

/**
 * Parse a state from JSON of the form {"d": n, "u": [[re, im], ...]}
 * (components in basis A; must be normalized). zero_tol at or below zero
 * selects the default 1e-9.
 */
enum KdlabStatus kdlab_state_parse_json(const char *json,
                                        double zero_tol,
                                        struct KdlabState **out_state);

/**
 * Release a state handle. Null is a no-op.
 */
void kdlab_state_free(struct KdlabState *state);

/**
 * Dimension of the state; 0 when the handle is null.
 */
size_t kdlab_state_dim(const struct KdlabState *state);

/**
 * Release a string returned through a char** out-parameter. Null is a
 * no-op.
 */
void kdlab_string_free(char *text);

/**
 * Decide complete incompatibility: true exactly when no minor of the
 * transition matrix vanishes.
 */
enum KdlabStatus kdlab_matrix_is_coinc(const struct KdlabMatrix *matrix, bool *out_coinc);

/**
 * Evaluate the incompatibility hierarchy.
 */
enum KdlabStatus kdlab_matrix_hierarchy(const struct KdlabMatrix *matrix,
                                        struct KdlabHierarchy *out_hierarchy);

/**
 * Compute the exact support-uncertainty diagram and return it as CSV with
 * header n_a,n_b,member,max_dim (release with kdlab_string_free).
 */
enum KdlabStatus kdlab_matrix_diagram_csv(const struct KdlabMatrix *matrix, char **out_csv);

/**
 * Decide whether the state's Kirkwood-Dirac distribution is classical
 * (real and nonnegative everywhere).
 */
enum KdlabStatus kdlab_kd_classical(const struct KdlabMatrix *matrix,
                                    const struct KdlabState *state,
                                    bool *out_classical);

/**
 * Extreme values of the Kirkwood-Dirac distribution: the smallest real
 * part and the largest |imaginary part| over all entries.
 */
enum KdlabStatus kdlab_kd_extremes(const struct KdlabMatrix *matrix,
                                   const struct KdlabState *state,
                                   double *out_min_real,
                                   double *out_max_abs_imag);

/**
 * Support profile of the state in the two bases.
 */
enum KdlabStatus kdlab_support_profile(const struct KdlabMatrix *matrix,
                                       const struct KdlabState *state,
                                       struct KdlabSupport *out_support);

/**
 * Run the nonclassicality witnesses. out_outcome receives
 * KDLAB_WITNESS_NONCLASSICAL or KDLAB_WITNESS_INCONCLUSIVE; out_rule
 * receives the KDLAB_RULE_* constant of the rule that fired.
 */
enum KdlabStatus kdlab_witness(const struct KdlabMatrix *matrix,
                               const struct KdlabState *state,
                               int32_t *out_outcome,
                               int32_t *out_rule);

/**
 * Perturb a basis pair into a completely incompatible one with per-round
 * angle budget eps. On success *out_matrix is the repaired matrix and
 * *out_deviation the operator-norm distance of the applied rotation from
 * the identity.
 */
enum KdlabStatus kdlab_coincify(const struct KdlabMatrix *matrix,
                                double eps,
                                struct KdlabMatrix **out_matrix,
                                double *out_deviation);

/**
 * Build a completely incompatible basis pair within delta of mutual
 * unbiasedness in dimension d.
 */
enum KdlabStatus kdlab_near_mub_coinc(size_t d, double delta, struct KdlabMatrix **out_matrix);

/**
 * Detail text of the most recent failure on this thread. Borrowed; valid
 * until the next kdlab call on the same thread. Empty after a success.
 */
const char *kdlab_last_error_message(void);

/**
 * Static name of a status code.
 */
const char *kdlab_status_name(enum KdlabStatus status);

/**
 * Library version as a static string.
 */
const char *kdlab_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* KDLAB_H */
