#ifndef QWELL1D_H
#define QWELL1D_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum qwell1d_status {
  QWELL1D_STATUS_OK = 0,
  QWELL1D_STATUS_NULL_POINTER = 1,
  QWELL1D_STATUS_INVALID_ARGUMENT = 2,
  QWELL1D_STATUS_CONFIG = 3,
  QWELL1D_STATUS_NUMERICAL = 4,
  QWELL1D_STATUS_OUT_OF_RANGE = 5,
  QWELL1D_STATUS_BUFFER_TOO_SMALL = 6,
  QWELL1D_STATUS_VALIDATION_FAILED = 7,
  QWELL1D_STATUS_PANIC = 8,
  QWELL1D_STATUS_IO = 9,
} qwell1d_status;

/**
 * Bound states of one well.
 */
typedef struct qwell1d_bound qwell1d_bound;

/**
 * A layer stack under construction.
 */
typedef struct qwell1d_structure qwell1d_structure;

/**
 * The rows of an energy sweep.
 */
typedef struct qwell1d_sweep qwell1d_sweep;

/**
 * Amplitudes and fluxes at one energy; `t` and `r` are referenced to the
 * structure's left edge.
 */
typedef struct qwell1d_scattering {
  double energy;
  double transmission;
  double reflection;
  double theta_t;
  double theta_r;
  double t_re;
  double t_im;
  double r_re;
  double r_im;
} qwell1d_scattering;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *qwell1d_version(void);

/**
 * Message of the last failed call on this thread, empty after a success.
 * The pointer stays valid until the next call into the library on this thread.
 */
const char *qwell1d_last_error(void);

/**
 * Complex wavenumber (nm⁻¹) on the branch with Re ≥ 0 and Im ≥ 0.
 *
 * # Safety
 * `re` and `im` must be valid for writes.
 */
enum qwell1d_status qwell1d_wavenumber(double energy,
                                       double potential,
                                       double mass_ratio,
                                       double *re,
                                       double *im);

/**
 * Starts an empty stack between leads at `lead_potential` (eV).
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum qwell1d_status qwell1d_structure_new(double lead_potential,
                                          double lead_mass_ratio,
                                          struct qwell1d_structure **out);

/**
 * Appends a layer on the right.
 *
 * # Safety
 * `structure` must come from [`qwell1d_structure_new`] and not be freed.
 */
enum qwell1d_status qwell1d_structure_push_layer(struct qwell1d_structure *structure,
                                                 double width,
                                                 double height,
                                                 double mass_ratio);

/**
 * # Safety
 * `structure` must be null or come from [`qwell1d_structure_new`], freed once.
 */
void qwell1d_structure_free(struct qwell1d_structure *structure);

/**
 * Transfer-matrix scattering of the stack at one energy.
 *
 * # Safety
 * `structure` must be a live handle and `out` valid for writes.
 */
enum qwell1d_status qwell1d_scatter(const struct qwell1d_structure *structure,
                                    double energy,
                                    struct qwell1d_scattering *out);

/**
 * Runs one sweep described by a JSON transmission job (the objects listed
 * under `sweeps` in a run configuration). Engine `both` yields the
 * closed-form rows.
 *
 * # Safety
 * `job_json` must be a NUL-terminated string and `out` valid for writes.
 */
enum qwell1d_status qwell1d_sweep_run(const char *job_json, struct qwell1d_sweep **out);

/**
 * Number of rows.
 *
 * # Safety
 * `sweep` must be a live handle.
 */
size_t qwell1d_sweep_len(const struct qwell1d_sweep *sweep);

/**
 * Row `index` (0-based). A row whose evaluation failed returns
 * `QWELL1D_NUMERICAL` with its energy filled in and every other field NaN.
 *
 * # Safety
 * `sweep` must be a live handle and `out` valid for writes.
 */
enum qwell1d_status qwell1d_sweep_row(const struct qwell1d_sweep *sweep,
                                      size_t index,
                                      struct qwell1d_scattering *out);

/**
 * # Safety
 * `sweep` must be null or a handle from [`qwell1d_sweep_run`], freed once.
 */
void qwell1d_sweep_free(struct qwell1d_sweep *sweep);

/**
 * Solves one well described by a JSON bound job (the objects listed under
 * `wells` in a run configuration).
 *
 * # Safety
 * `job_json` must be a NUL-terminated string and `out` valid for writes.
 */
enum qwell1d_status qwell1d_bound_solve(const char *job_json, struct qwell1d_bound **out);

/**
 * Number of solved modes.
 *
 * # Safety
 * `bound` must be a live handle.
 */
size_t qwell1d_bound_modes(const struct qwell1d_bound *bound);

/**
 * Number of interior grid samples.
 *
 * # Safety
 * `bound` must be a live handle.
 */
size_t qwell1d_bound_grid_len(const struct qwell1d_bound *bound);

/**
 * Energy (eV) of mode `n`, counted from 1.
 *
 * # Safety
 * `bound` must be a live handle and `energy` valid for writes.
 */
enum qwell1d_status qwell1d_bound_energy(const struct qwell1d_bound *bound,
                                         size_t n,
                                         double *energy);

/**
 * Sample positions (nm from the left wall) into `buf[0..grid_len]`.
 *
 * # Safety
 * `bound` must be a live handle and `buf` valid for `len` writes.
 */
enum qwell1d_status qwell1d_bound_positions(const struct qwell1d_bound *bound,
                                            double *buf,
                                            size_t len);

/**
 * Wavefunction of mode `n` (normalized so Σψ²Δx = 1) into `buf[0..grid_len]`.
 *
 * # Safety
 * `bound` must be a live handle and `buf` valid for `len` writes.
 */
enum qwell1d_status qwell1d_bound_wavefunction(const struct qwell1d_bound *bound,
                                               size_t n,
                                               double *buf,
                                               size_t len);

/**
 * # Safety
 * `bound` must be null or a handle from [`qwell1d_bound_solve`], freed once.
 */
void qwell1d_bound_free(struct qwell1d_bound *bound);

/**
 * Runs a complete JSON run configuration, writing its CSV files into
 * `out_dir` exactly as the command-line tool does. A validation run whose
 * checks fail returns `QWELL1D_VALIDATION_FAILED`.
 *
 * # Safety
 * Both arguments must be NUL-terminated strings.
 */
enum qwell1d_status qwell1d_run_config(const char *config_json, const char *out_dir);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QWELL1D_H */
