/* C interface to the spinbath central-spin dephasing library.
* Generated by the build; do not edit by hand. */

#ifndef SPINBATH_H
#define SPINBATH_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status code returned by every fallible entry point.
 */
typedef enum SbStatus {
  /**
   * Success.
   */
  SbOk = 0,
  /**
   * A parameter violated its documented range.
   */
  SbInvalidParam = 1,
  /**
   * The bath state makes the decoherence factor complex, so the
   * real-factor phase routines do not apply.
   */
  SbComplexDecoherence = 2,
  /**
   * Quadrature refinement did not reach the requested tolerance.
   */
  SbQuadratureNotConverged = 3,
  /**
   * The reduced-state eigenvalues crossed during the cycle.
   */
  SbEigenvalueCrossing = 4,
  /**
   * Coherence magnitude left the physical range.
   */
  SbCoherenceOutOfRange = 5,
  /**
   * Bath too large for the requested brute-force route.
   */
  SbBathTooLarge = 6,
  /**
   * A required pointer was null.
   */
  SbNullPointer = 7,
  /**
   * The library panicked; state on the handle is still valid.
   */
  SbPanic = 8,
  /**
   * Failure with no dedicated code.
   */
  SbInternal = 9,
} SbStatus;

/**
 * Opaque bath handle.
 */
typedef struct SbBath SbBath;

/**
 * One bath spin: parameters plus its initial state amplitudes.
 */
typedef struct SbBathSpin {
  /**
   * Self-frequency (>= 0).
   */
  double omega;
  /**
   * Coupling to the central spin (>= 0).
   */
  double lambda;
  double amp0_re;
  double amp0_im;
  double amp1_re;
  double amp1_im;
} SbBathSpin;

/**
 * Complex number as a pair of doubles.
 */
typedef struct SbComplex {
  double re;
  double im;
} SbComplex;

/**
 * Result of a geometric-phase evaluation.
 */
typedef struct SbGpResult {
  /**
   * Accumulated phase, radians.
   */
  double phase;
  /**
   * Difference between the last two quadrature refinements.
   */
  double estimated_error;
  /**
   * Integrand evaluations spent.
   */
  uint64_t evaluations;
} SbGpResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Static description of a status code. Never null.
 */
const char *sb_status_message(enum SbStatus status);

/**
 * Thread-local message for the most recent failure on this thread.
 * Valid until the next failing call on the same thread. Never null.
 */
const char *sb_last_error_message(void);

/**
 * Create a homogeneous bath: `n` spins at (`omega`, `lambda`), each in the
 * +1 eigenstate of its sigma-x. Writes the handle to `out`.
 *
 * # Safety
 * `out` must be a valid pointer. The handle must be released with
 * [`sb_bath_free`].
 */
enum SbStatus sb_bath_new_homogeneous(uintptr_t n,
                                      double omega,
                                      double lambda,
                                      struct SbBath **out);

/**
 * Create a bath from `count` explicit spins. Writes the handle to `out`.
 *
 * # Safety
 * `spins` must point to `count` readable elements; `out` must be valid.
 * The handle must be released with [`sb_bath_free`].
 */
enum SbStatus sb_bath_new(const struct SbBathSpin *spins, uintptr_t count, struct SbBath **out);

/**
 * Release a bath handle. Null is a no-op. The handle must not be used
 * afterwards.
 *
 * # Safety
 * `bath` must be a handle from a constructor, released at most once.
 */
void sb_bath_free(struct SbBath *bath);

/**
 * Number of spins in the bath; 0 for a null handle.
 *
 * # Safety
 * `bath` must be null or a live handle.
 */
uintptr_t sb_bath_len(const struct SbBath *bath);

/**
 * Closed-form decoherence factor of the bath at time `t` (exact when every
 * spin starts in a sigma-x eigenstate).
 *
 * # Safety
 * `bath` must be a live handle; `out` must be valid.
 */
enum SbStatus sb_decoherence_factor(const struct SbBath *bath, double t, double *out);

/**
 * Brute-force decoherence factor (valid for any initial bath state).
 *
 * # Safety
 * `bath` must be a live handle; `out` must be valid.
 */
enum SbStatus sb_decoherence_factor_exact(const struct SbBath *bath,
                                          double t,
                                          struct SbComplex *out);

/**
 * Reduced density matrix of the central spin at time `t`, row-major into
 * `out[4]`, using the closed-form factor of `bath`.
 *
 * # Safety
 * `bath` must be a live handle; `out` must point to 4 writable elements.
 */
enum SbStatus sb_reduced_density(double central_omega,
                                 double theta0,
                                 const struct SbBath *bath,
                                 double t,
                                 struct SbComplex *out);

/**
 * Unitary one-cycle geometric phase pi(1 + cos theta0).
 */
double sb_unitary_gp(double theta0);

/**
 * Geometric phase over `cycles` quasi-cycles by direct quadrature.
 * Requires every bath spin to start in a sigma-x eigenstate.
 *
 * # Safety
 * `bath` must be a live handle; `out` must be valid.
 */
enum SbStatus sb_gp_exact(double central_omega,
                          double theta0,
                          const struct SbBath *bath,
                          uint32_t cycles,
                          double tolerance,
                          struct SbGpResult *out);

/**
 * Geometric phase over `cycles` quasi-cycles from the kinematic
 * (eigenbranch) functional. Same preconditions as [`sb_gp_exact`].
 *
 * # Safety
 * `bath` must be a live handle; `out` must be valid.
 */
enum SbStatus sb_gp_kinematic(double central_omega,
                              double theta0,
                              const struct SbBath *bath,
                              uint32_t cycles,
                              double tolerance,
                              struct SbGpResult *out);

/**
 * Quadratic weak-coupling approximation of the one-cycle phase for a
 * homogeneous bath of `n` spins at (`bath_omega`, `lambda`).
 *
 * # Safety
 * `out` must be valid.
 */
enum SbStatus sb_gp_perturbative(double central_omega,
                                 double theta0,
                                 uintptr_t n,
                                 double bath_omega,
                                 double lambda,
                                 double *out);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* SPINBATH_H */
