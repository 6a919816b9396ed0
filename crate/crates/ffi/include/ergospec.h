/* C interface to the ergospec library. Generated; do not edit. */

#ifndef ERGOSPEC_H
#define ERGOSPEC_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status code returned by every fallible call.
 */
typedef enum EsStatus {
  EsStatus_Ok = 0,
  /**
   * A required pointer argument was null.
   */
  EsStatus_NullPointer = 1,
  /**
   * A parameter was out of range or inconsistent.
   */
  EsStatus_InvalidArgument = 2,
  /**
   * Axis counts of the arguments disagree.
   */
  EsStatus_DimensionMismatch = 3,
  /**
   * The request needs values outside the materialized box.
   */
  EsStatus_BoxExceeded = 4,
  /**
   * The operator family is not commuting unitaries within tolerance.
   */
  EsStatus_InvalidSystem = 5,
  /**
   * A checked mathematical invariant failed.
   */
  EsStatus_InvariantViolation = 6,
  EsStatus_Io = 7,
  /**
   * Malformed JSON, or JSON not matching the expected schema.
   */
  EsStatus_Json = 8,
  /**
   * A string argument was not valid UTF-8.
   */
  EsStatus_Utf8 = 9,
  /**
   * An internal panic was caught at the boundary.
   */
  EsStatus_Panic = 10,
} EsStatus;

/**
 * Opaque handle over a materialized weight sequence.
 */
typedef struct EsWeights EsWeights;

/**
 * Tally of one seeded van der Corput sweep campaign.
 */
typedef struct EsVdcSummary {
  /**
   * Windows checked across all trials.
   */
  uint64_t windows;
  /**
   * Windows where the bound failed beyond tolerance (expected 0).
   */
  uint64_t violations;
  /**
   * Largest of `lhs - rhs` over all windows; negative when the bound
   * holds with room.
   */
  double worst_margin;
} EsVdcSummary;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string; do not free.
 */
const char *es_version(void);

/**
 * Message of the most recent failure on this thread, or null if none.
 * The pointer stays valid until the next failing call on the same thread;
 * do not free it.
 */
const char *es_last_error_message(void);

/**
 * Build a weight sequence from an interleaved complex table.
 *
 * `box_hi` holds the per-axis upper corner (inclusive, `dim` entries); the
 * table covers `[0, box_hi]` in row-major order, `values` holding
 * `re, im, re, im, ...` with `len` complex entries (so `2 * len` doubles).
 *
 * # Safety
 *
 * `box_hi` must point to `dim` readable `int64_t`, `values` to `2 * len`
 * readable doubles, and `out` to a writable pointer slot. On success the
 * caller owns the handle and must release it with [`es_weights_free`].
 */
enum EsStatus es_weights_from_values(const int64_t *box_hi,
                                     uintptr_t dim,
                                     const double *values,
                                     uintptr_t len,
                                     struct EsWeights **out);

/**
 * Build a weight sequence from a JSON spec (the CLI `weight` object):
 * `{"box": [...], "values": [[re,im],...]}` or `{"box": [...],
 * "generator": {...}}`.
 *
 * # Safety
 *
 * `spec_json` must be a NUL-terminated string and `out` a writable pointer
 * slot. On success the caller owns the handle and must release it with
 * [`es_weights_free`].
 */
enum EsStatus es_weights_from_json(const char *spec_json, struct EsWeights **out);

/**
 * Release a handle obtained from a constructor. Null is a no-op.
 *
 * # Safety
 *
 * `w` must be null or a pointer previously returned by a constructor and
 * not yet freed.
 */
void es_weights_free(struct EsWeights *w);

/**
 * Number of lattice axes of the sequence.
 *
 * # Safety
 *
 * `w` must be a live handle and `out` writable.
 */
enum EsStatus es_weights_dim(const struct EsWeights *w, uintptr_t *out);

/**
 * Largest modulus over the materialized box.
 *
 * # Safety
 *
 * `w` must be a live handle and `out` writable.
 */
enum EsStatus es_weights_sup_norm(const struct EsWeights *w, double *out);

/**
 * Windowed correlation at lag `m`, truncation `n` (both `dim` entries).
 *
 * # Safety
 *
 * `w` must be a live handle; `m` and `n` must point to `dim` readable
 * `int64_t`; `out_re` and `out_im` must be writable.
 */
enum EsStatus es_weights_correlation(const struct EsWeights *w,
                                     const int64_t *m,
                                     const int64_t *n,
                                     uintptr_t dim,
                                     double *out_re,
                                     double *out_im);

/**
 * Twisted Cesaro average at the torus point with the given angles
 * (`dim` entries, units of full turns), truncation `n`.
 *
 * # Safety
 *
 * `w` must be a live handle; `angles` must point to `dim` readable doubles
 * and `n` to `dim` readable `int64_t`; `out_re` and `out_im` must be
 * writable.
 */
enum EsStatus es_weights_amplitude(const struct EsWeights *w,
                                   const double *angles,
                                   const int64_t *n,
                                   uintptr_t dim,
                                   double *out_re,
                                   double *out_im);

/**
 * Estimated mass of the atom at the given angles: the empirical spectral
 * density at truncation `n` averaged over the symmetric coefficient window
 * `[-h, h]`.
 *
 * # Safety
 *
 * `w` must be a live handle; `angles`, `n` and `h` must each point to
 * `dim` readable entries of their type; `out` must be writable.
 */
enum EsStatus es_weights_point_mass(const struct EsWeights *w,
                                    const double *angles,
                                    const int64_t *n,
                                    const int64_t *h,
                                    uintptr_t dim,
                                    double *out);

/**
 * Wiener continuity average of the empirical spectral density at
 * truncation `n` over the window `[-h, h]`; tends to the sum of squared
 * atom masses.
 *
 * # Safety
 *
 * `w` must be a live handle; `n` and `h` must point to `dim` readable
 * `int64_t`; `out` must be writable.
 */
enum EsStatus es_weights_wiener(const struct EsWeights *w,
                                const int64_t *n,
                                const int64_t *h,
                                uintptr_t dim,
                                double *out);

/**
 * Run the almost-periodicity classifier. `config_json` holds the classifier
 * config (`ladder`, `grid`, optional window and tolerance overrides) and the
 * full report comes back as a JSON string in `out_json`, to be released
 * with [`es_string_free`].
 *
 * # Safety
 *
 * `w` must be a live handle, `config_json` a NUL-terminated string and
 * `out_json` a writable pointer slot.
 */
enum EsStatus es_weights_classify_json(const struct EsWeights *w,
                                       const char *config_json,
                                       char **out_json);

/**
 * Release a string returned by this library. Null is a no-op.
 *
 * # Safety
 *
 * `s` must be null or a pointer previously returned in an `out_json`
 * argument and not yet freed.
 */
void es_string_free(char *s);

/**
 * Seeded van der Corput fuzz campaign: `trials` random Gaussian operator
 * arrays (matrix dimension up to `max_dim`, extents up to
 * `max_n1 x max_n2`), each checked over every admissible window pair.
 * Fills `out` with the tally; a nonzero violation count signals an
 * implementation bug, reported as [`EsStatus::InvariantViolation`].
 *
 * # Safety
 *
 * `out` must point to a writable [`EsVdcSummary`].
 */
enum EsStatus es_vdc_gaussian_sweep(uint64_t seed,
                                    uint64_t trials,
                                    uintptr_t max_dim,
                                    uintptr_t max_n1,
                                    uintptr_t max_n2,
                                    struct EsVdcSummary *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ERGOSPEC_H */
