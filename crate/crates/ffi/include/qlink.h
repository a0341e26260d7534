#ifndef QLINK_H
#define QLINK_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes.
 */
typedef enum QlinkStatus {
  QLINK_STATUS_OK = 0,
  QLINK_STATUS_NULL_POINTER = 1,
  QLINK_STATUS_INVALID_PARAMETER = 2,
  QLINK_STATUS_GRID_MISALIGNED = 3,
  QLINK_STATUS_OUT_OF_RANGE = 4,
  QLINK_STATUS_TRUNCATION = 5,
  QLINK_STATUS_STEP_TOO_COARSE = 6,
  QLINK_STATUS_OPTIMIZATION = 7,
  QLINK_STATUS_BUFFER_TOO_SMALL = 8,
  QLINK_STATUS_IO = 9,
  QLINK_STATUS_PANIC = 10,
} QlinkStatus;

/**
 * State-transfer protocol families.
 */
typedef enum QlinkProtocol {
  QLINK_PROTOCOL_SWAP = 0,
  QLINK_PROTOCOL_STIRAP = 1,
  QLINK_PROTOCOL_CZKM = 2,
} QlinkProtocol;

/**
 * Opaque link parameters.
 */
typedef struct QlinkLink QlinkLink;

/**
 * Opaque sampled trajectory.
 */
typedef struct QlinkTrajectory QlinkTrajectory;

/**
 * Scalar outcome of one protocol run.
 */
typedef struct QlinkRunResult {
  double fidelity;
  double infidelity;
  double loss_error;
  double photon_integral;
} QlinkRunResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *qlink_version(void);

/**
 * Message of the last failed call on this thread. The pointer stays valid
 * until the next failing call on the same thread.
 */
const char *qlink_last_error(void);

/**
 * Creates a link with decay scale `gamma0`, traversal time `tau` and
 * emitter frequency `delta`.
 *
 * # Safety
 * `out` must be a valid pointer to writable storage for one handle.
 */
enum QlinkStatus qlink_link_new(double gamma0, double tau, double delta, struct QlinkLink **out);

/**
 * Creates a link from `γ₀τ` and `Δ/δω_FSR` with `τ = 1`.
 *
 * # Safety
 * `out` must be a valid pointer to writable storage for one handle.
 */
enum QlinkStatus qlink_link_from_scaled(double gamma0_tau,
                                        double delta_over_fsr,
                                        struct QlinkLink **out);

/**
 * Releases a link. Null is ignored.
 *
 * # Safety
 * `link` must come from a `qlink_link_*` constructor and not be used again.
 */
void qlink_link_free(struct QlinkLink *link);

/**
 * Single-traversal phase `φ = Δτ`.
 *
 * # Safety
 * `link` must be a live handle and `out` writable.
 */
enum QlinkStatus qlink_link_phi(const struct QlinkLink *link, double *out);

/**
 * Free spectral range `π/τ`.
 *
 * # Safety
 * `link` must be a live handle and `out` writable.
 */
enum QlinkStatus qlink_link_fsr(const struct QlinkLink *link, double *out);

/**
 * One emitter at an end of the link, excited at `t = 0` and coupled at
 * the link's `γ₀` until `t_end`.
 *
 * # Safety
 * `link` must be a live handle and `out` writable.
 */
enum QlinkStatus qlink_evolve_single(const struct QlinkLink *link,
                                     double t_end,
                                     size_t steps_per_tau,
                                     struct QlinkTrajectory **out);

/**
 * Runs a protocol of length `duration` from `c = (1, 0)`. `result` and
 * `trajectory` are each optional (null to skip).
 *
 * # Safety
 * `link` must be a live handle; non-null outputs must be writable.
 */
enum QlinkStatus qlink_run_protocol(const struct QlinkLink *link,
                                    enum QlinkProtocol protocol,
                                    double duration,
                                    size_t steps_per_tau,
                                    double kappa,
                                    struct QlinkRunResult *result,
                                    struct QlinkTrajectory **trajectory);

/**
 * Releases a trajectory. Null is ignored.
 *
 * # Safety
 * `traj` must come from this library and not be used again.
 */
void qlink_trajectory_free(struct QlinkTrajectory *traj);

/**
 * Number of time samples, or 0 for null.
 *
 * # Safety
 * `traj` must be null or a live handle.
 */
size_t qlink_trajectory_len(const struct QlinkTrajectory *traj);

/**
 * Number of emitters, or 0 for null.
 *
 * # Safety
 * `traj` must be null or a live handle.
 */
size_t qlink_trajectory_emitters(const struct QlinkTrajectory *traj);

/**
 * Copies the sample times into `buf`, which must hold
 * `qlink_trajectory_len` values.
 *
 * # Safety
 * `traj` must be a live handle and `buf` valid for `cap` writes.
 */
enum QlinkStatus qlink_trajectory_times(const struct QlinkTrajectory *traj,
                                        double *buf,
                                        size_t cap);

/**
 * Copies the real and imaginary parts of `c_emitter(t_i)`.
 *
 * # Safety
 * `traj` must be a live handle; `re` and `im` valid for `cap` writes.
 */
enum QlinkStatus qlink_trajectory_amplitudes(const struct QlinkTrajectory *traj,
                                             size_t emitter,
                                             double *re,
                                             double *im,
                                             size_t cap);

/**
 * Transfer fidelity `|c₂(t)|²` of a two-emitter trajectory.
 *
 * # Safety
 * `traj` must be a live handle and `out` writable.
 */
enum QlinkStatus qlink_fidelity(const struct QlinkTrajectory *traj, double t, double *out);

/**
 * Eigenfrequencies of the single-emitter link in `[lo, hi]`. `count`
 * always receives the number of roots; the call fails with
 * `BufferTooSmall` when `cap` is less.
 *
 * # Safety
 * `link` must be a live handle, `count` writable, `buf` valid for `cap`
 * writes.
 */
enum QlinkStatus qlink_eigenfrequencies(const struct QlinkLink *link,
                                        double lo,
                                        double hi,
                                        double *buf,
                                        size_t cap,
                                        size_t *count);

/**
 * Exact single-emitter amplitude at `t` for decay `gamma`, echo delay
 * `delay` and echo phase `phi`, starting from `c(0) = 1`.
 *
 * # Safety
 * `re` and `im` must be writable.
 */
enum QlinkStatus qlink_series(double gamma,
                              double delay,
                              double phi,
                              double t,
                              double *re,
                              double *im);

/**
 * Exact infidelity of the resonant `tanh`-ramp protocol of length
 * `duration`.
 *
 * # Safety
 * `out` must be writable.
 */
enum QlinkStatus qlink_czkm_exact_error(double gamma0, double tau, double duration, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QLINK_H */
