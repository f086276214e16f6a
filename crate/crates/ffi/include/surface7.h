#ifndef SURFACE7_H
#define SURFACE7_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every fallible call.
 */
typedef enum S7Status {
  S7_STATUS_OK = 0,
  /**
   * A required pointer was NULL.
   */
  S7_STATUS_NULL_POINTER = 1,
  /**
   * Bad enumeration value, range or string argument.
   */
  S7_STATUS_INVALID_ARGUMENT = 2,
  /**
   * File could not be read or written.
   */
  S7_STATUS_IO = 3,
  /**
   * Malformed JSON or CSV.
   */
  S7_STATUS_PARSE = 4,
  /**
   * Fit, optimizer or simulation failure.
   */
  S7_STATUS_NUMERICAL = 5,
  /**
   * Caller buffer shorter than the result; the required length is reported.
   */
  S7_STATUS_BUFFER_TOO_SMALL = 6,
  /**
   * Internal panic, caught at the boundary.
   */
  S7_STATUS_PANIC = 7,
} S7Status;

typedef enum S7Scheme {
  S7_SCHEME_PIPELINED = 0,
  S7_SCHEME_PARALLEL = 1,
} S7Scheme;

typedef enum S7Series {
  /**
   * P(n), the post-selected fraction.
   */
  S7_SERIES_POST_SELECTED = 0,
  /**
   * Logical expectation value after post-selection.
   */
  S7_SERIES_EXPECTATION = 1,
  /**
   * End of the final readout, ns.
   */
  S7_SERIES_TIME_NS = 2,
} S7Series;

/**
 * Device parameter table.
 */
typedef struct S7Device S7Device;

/**
 * Noise model (level, device and leakage).
 */
typedef struct S7Model S7Model;

/**
 * Outcome of a repeated-stabilization run.
 */
typedef struct S7Record S7Record;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread ("" after a success). The pointer
 * stays valid until the next call into the library from the same thread.
 */
const char *s7_last_error(void);

/**
 * Library version (package version plus git describe), a static NUL-terminated string.
 */
const char *s7_version(void);

/**
 * Loads a device table. `spec` is `builtin:table-s1`, `builtin:example` or a JSON path.
 *
 * # Safety
 * `spec` must be a NUL-terminated string; `device` a valid out-pointer.
 */
enum S7Status s7_device_load(const char *spec, struct S7Device **device);

/**
 * # Safety
 * `device` must come from [`s7_device_load`] and not be freed twice.
 */
void s7_device_free(struct S7Device *device);

/**
 * Noise model at `level` (0 to 5) on a copy of `device`; `l1` is used at level 5.
 *
 * # Safety
 * `device` must be a live handle; `model` a valid out-pointer.
 */
enum S7Status s7_model_new(const struct S7Device *device,
                           uint8_t level,
                           double l1,
                           struct S7Model **model);

/**
 * # Safety
 * `model` must come from [`s7_model_new`] and not be freed twice.
 */
void s7_model_free(struct S7Model *model);

/**
 * Repeated stabilization of a cardinal `state` ("0", "1", "+", "-", "+i", "-i") read
 * out in `basis` after each of `cycles` rounds.
 *
 * # Safety
 * `model` must be live, `state` NUL-terminated, `record` a valid out-pointer.
 */
enum S7Status s7_stabilize(const struct S7Model *model,
                           enum S7Scheme scheme,
                           const char *state,
                           char basis_char,
                           size_t cycles,
                           struct S7Record **record);

/**
 * Number of cycles in `record` (0 for NULL).
 *
 * # Safety
 * `record` must be NULL or live.
 */
size_t s7_record_len(const struct S7Record *record);

/**
 * Copies one series into `buf` (capacity `len`). `written` receives the series length;
 * with a short buffer nothing is copied and `BufferTooSmall` is returned.
 *
 * # Safety
 * `record` live; `buf` valid for `len` doubles (may be NULL when `len` is 0).
 */
enum S7Status s7_record_series(const struct S7Record *record,
                               enum S7Series series,
                               double *buf,
                               size_t len,
                               size_t *written);

/**
 * # Safety
 * `record` must come from [`s7_stabilize`] and not be freed twice.
 */
void s7_record_free(struct S7Record *record);

/**
 * Fits P(n) = A(1−γ)^n to `p[0..n]` taken at cycles 1..=n.
 *
 * # Safety
 * `p` valid for `n` doubles; `amplitude` and `gamma` valid out-pointers.
 */
enum S7Status s7_fit_decay(const double *p, size_t n, double *amplitude, double *gamma);

/**
 * Logical process tomography of `gate` (ZL, XL, TL, XL90, Z:<rad>, X:<rad>) with exact
 * readout. `ptm` may be NULL; otherwise it receives the TPCP-projected 4×4 Pauli transfer
 * matrix, row-major with rows indexing the output Pauli.
 *
 * # Safety
 * `model` live, `gate` NUL-terminated, `fidelity` valid, `ptm` NULL or valid for 16 doubles.
 */
enum S7Status s7_gate_tomography(const struct S7Model *model,
                                 enum S7Scheme scheme,
                                 const char *gate,
                                 double *fidelity,
                                 double *ptm);

/**
 * Mean γ_pipelined/γ_parallel over the four cardinal Z and X inputs (`cycles` ≥ 5).
 *
 * # Safety
 * `model` live; `ratio` a valid out-pointer.
 */
enum S7Status s7_scheme_ratio(const struct S7Model *model, size_t cycles, double *ratio);

/**
 * Runs a CLI configuration given as JSON (the `experiment` field selects the
 * subcommand) and writes its outputs and manifest to the configured directory.
 *
 * # Safety
 * `config_json` must be NUL-terminated.
 */
enum S7Status s7_run_config(const char *config_json);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SURFACE7_H */
