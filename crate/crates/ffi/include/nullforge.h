#ifndef NULLFORGE_H
#define NULLFORGE_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Status returned by every fallible call.
typedef enum NfStatus {
  NF_STATUS_OK = 0,
  NF_STATUS_NULL_POINTER = 1,
  NF_STATUS_INVALID_UTF8 = 2,
  NF_STATUS_CONFIG = 3,
  NF_STATUS_DOMAIN = 4,
  NF_STATUS_NUMERICAL = 5,
  NF_STATUS_GEOMETRY = 6,
  NF_STATUS_IO = 7,
  NF_STATUS_BUFFER_TOO_SMALL = 8,
  NF_STATUS_PANIC = 9,
} NfStatus;

// A conformal minimal disc or annulus in ℝⁿ.
typedef struct NfImmersion NfImmersion;

// The report of a finished pipeline run.
typedef struct NfRun NfRun;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Copies the message of the last failed call on this thread into `buf`.
// Returns the message length including the NUL; nothing is written when
// `len` is smaller than that.
//
// # Safety
// `buf` must be null or valid for `len` bytes.
size_t nf_last_error(char *buf, size_t len);

// Flat disc ζ ↦ scale·(ℜζ, ℑζ, 0, …) in ℝⁿ.
//
// # Safety
// `out` must be valid for one pointer write.
enum NfStatus nf_immersion_plane(size_t n, double scale, struct NfImmersion **out);

// The catenoid on 0.2 < |ζ| < 1.
//
// # Safety
// `out` must be valid for one pointer write.
enum NfStatus nf_immersion_catenoid(struct NfImmersion **out);

// Parses an immersion from its JSON form.
//
// # Safety
// `json` must be a NUL-terminated string and `out` valid for one pointer write.
enum NfStatus nf_immersion_from_json(const char *json, struct NfImmersion **out);

// Serializes an immersion to JSON; see [`nf_last_error`] for the buffer rules.
//
// # Safety
// `imm` must come from this library; `buf` null or valid for `len` bytes;
// `needed` null or valid for one write.
enum NfStatus nf_immersion_to_json(const struct NfImmersion *imm,
                                   char *buf,
                                   size_t len,
                                   size_t *needed);

// # Safety
// `imm` must be null or come from this library, and not be used afterwards.
void nf_immersion_free(struct NfImmersion *imm);

// Ambient dimension n, or 0 for a null handle.
//
// # Safety
// `imm` must be null or come from this library.
size_t nf_immersion_dim(const struct NfImmersion *imm);

// F(re + i·im) into `out[0..n]`.
//
// # Safety
// `imm` must come from this library and `out` be valid for `len` doubles.
enum NfStatus nf_immersion_eval(const struct NfImmersion *imm,
                                double re,
                                double im,
                                double *out,
                                size_t len);

// Conformal factor λ with ‖dF‖ = λ|dζ|.
//
// # Safety
// `imm` must come from this library and `out` be valid for one write.
enum NfStatus nf_conformal_factor(const struct NfImmersion *imm, double re, double im, double *out);

// Flux over the circle of the given radius into `out[0..n]`.
//
// # Safety
// `imm` must come from this library and `out` be valid for `len` doubles.
enum NfStatus nf_flux(const struct NfImmersion *imm, double radius, double *out, size_t len);

// Runs the experiment described by a JSON pipeline config.
//
// # Safety
// `config` must be a NUL-terminated string and `out` valid for one pointer write.
enum NfStatus nf_run(const char *config, struct NfRun **out);

// 1 if every checked inequality of the run holds, 0 otherwise or for null.
//
// # Safety
// `run` must be null or come from this library.
int32_t nf_run_passed(const struct NfRun *run);

// The report JSON of a run.
//
// # Safety
// `run` must come from this library; `buf` null or valid for `len` bytes;
// `needed` null or valid for one write.
enum NfStatus nf_run_report_json(const struct NfRun *run, char *buf, size_t len, size_t *needed);

// # Safety
// `run` must be null or come from this library, and not be used afterwards.
void nf_run_free(struct NfRun *run);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* NULLFORGE_H */
