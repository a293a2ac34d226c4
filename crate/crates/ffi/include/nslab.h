#ifndef NSLAB_H
#define NSLAB_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call.
 */
typedef enum NslabStatus {
  NSLAB_STATUS_OK = 0,
  NSLAB_STATUS_NULL_POINTER = 1,
  NSLAB_STATUS_INVALID_UTF8 = 2,
  NSLAB_STATUS_INVALID_ARGUMENT = 3,
  NSLAB_STATUS_CONFIG = 4,
  NSLAB_STATUS_IO = 5,
  /**
   * Quadrature, resolution, containment or aliasing guard.
   */
  NSLAB_STATUS_NUMERICAL = 6,
  /**
   * Blow-up, Picard divergence or sweep limit.
   */
  NSLAB_STATUS_SOLVER = 7,
  NSLAB_STATUS_UNKNOWN_EXPERIMENT = 8,
  NSLAB_STATUS_PANIC = 9,
} NslabStatus;

/**
 * Opaque experiment configuration.
 */
typedef struct NslabConfig NslabConfig;

/**
 * Opaque result of one experiment run.
 */
typedef struct NslabReport NslabReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. Valid until the
 * next failing call on the same thread.
 */
const char *nslab_last_error_message(void);

/**
 * Library version as a static string.
 */
const char *nslab_version(void);

/**
 * Default configuration. Free with [`nslab_config_free`].
 */
struct NslabConfig *nslab_config_default(void);

/**
 * Parses a TOML configuration; missing keys take their defaults.
 *
 * # Safety
 * `text` must be a nul-terminated string and `out` a valid pointer.
 */
enum NslabStatus nslab_config_from_toml(const char *text, struct NslabConfig **out);

/**
 * # Safety
 * `cfg` must come from this library and not be used afterwards.
 */
void nslab_config_free(struct NslabConfig *cfg);

/**
 * # Safety
 * `cfg` must be a live configuration handle.
 */
enum NslabStatus nslab_config_set_seed(struct NslabConfig *cfg, uint64_t seed);

/**
 * Writes the 16-hex-digit configuration hash plus a nul into `buf`, which
 * must hold at least 17 bytes.
 *
 * # Safety
 * `cfg` must be live and `buf` writable for `len` bytes.
 */
enum NslabStatus nslab_config_hash(const struct NslabConfig *cfg, char *buf, size_t len);

/**
 * Runs an experiment by its subcommand name. When `out_dir` is not null
 * the CSV and JSON files are written there. Free the report with
 * [`nslab_report_free`].
 *
 * # Safety
 * `cfg` must be live, `name` (and `out_dir` if given) nul-terminated, and
 * `out` a valid pointer.
 */
enum NslabStatus nslab_run(const struct NslabConfig *cfg,
                           const char *name,
                           const char *out_dir,
                           struct NslabReport **out);

/**
 * # Safety
 * `report` must come from this library and not be used afterwards.
 */
void nslab_report_free(struct NslabReport *report);

/**
 * 1 if every gating check passed, 0 if not, -1 for a null handle.
 *
 * # Safety
 * `report` must be null or live.
 */
int32_t nslab_report_passed(const struct NslabReport *report);

/**
 * Status of acceptance criterion `id`: 1 pass, 0 fail, -1 if the report
 * carries no check for it or the handle is null.
 *
 * # Safety
 * `report` must be null or live.
 */
int32_t nslab_report_criterion(const struct NslabReport *report, uint8_t id);

/**
 * Number of checks in the report, 0 for a null handle.
 *
 * # Safety
 * `report` must be null or live.
 */
size_t nslab_report_num_checks(const struct NslabReport *report);

/**
 * Measured value and pass flag of check `index`.
 *
 * # Safety
 * `report` must be live; `measured` and `passed` valid pointers.
 */
enum NslabStatus nslab_report_check(const struct NslabReport *report,
                                    size_t index,
                                    double *measured,
                                    int32_t *passed);

/**
 * Report as JSON. Free the string with [`nslab_string_free`].
 *
 * # Safety
 * `report` must be live and `out` a valid pointer.
 */
enum NslabStatus nslab_report_json(const struct NslabReport *report, char **out);

/**
 * # Safety
 * `s` must come from this library and not be used afterwards.
 */
void nslab_string_free(char *s);

/**
 * Steady residual summary of the Landau solution `c` on `samples` random
 * points in the shell `0.5 ≤ |x| ≤ 4`.
 *
 * # Safety
 * Output pointers must be valid.
 */
enum NslabStatus nslab_landau_residual(double c,
                                       size_t samples,
                                       double h,
                                       uint64_t seed,
                                       double *max,
                                       double *median,
                                       double *max_divergence);

/**
 * `C_ℓ`, the `L¹` mass of the hyperviscous kernel at unit time.
 *
 * # Safety
 * Output pointers must be valid.
 */
enum NslabStatus nslab_compute_cl(double ell, double *value, double *error_estimate);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* NSLAB_H */
