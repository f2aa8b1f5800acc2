//! C ABI over the spinbath library.
//!
//! Conventions:
//! - every fallible call returns an [`SbStatus`] and writes its result
//!   through out-pointers, which are untouched on failure;
//! - baths are opaque handles created by `sb_bath_*` constructors and
//!   released with [`sb_bath_free`];
//! - a panic inside the library is caught at the boundary and surfaces as
//!   [`SbStatus::SbPanic`] instead of unwinding into the caller;
//! - [`sb_last_error_message`] returns a thread-local description of the
//!   most recent failure, valid until the next failing call on the thread.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use num_complex::Complex64;
use spinbath::model::{reduced_density_matrix, Bath, BathSpin, CentralSpin};
use spinbath::oracle::decoherence_factor_exact;
use spinbath::phase::{gp_exact, gp_kinematic, gp_perturbative, unitary_gp, QuadratureSpec};
use spinbath::Error;

/// Status code returned by every fallible entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SbStatus {
    /// Success.
    SbOk = 0,
    /// A parameter violated its documented range.
    SbInvalidParam = 1,
    /// The bath state makes the decoherence factor complex, so the
    /// real-factor phase routines do not apply.
    SbComplexDecoherence = 2,
    /// Quadrature refinement did not reach the requested tolerance.
    SbQuadratureNotConverged = 3,
    /// The reduced-state eigenvalues crossed during the cycle.
    SbEigenvalueCrossing = 4,
    /// Coherence magnitude left the physical range.
    SbCoherenceOutOfRange = 5,
    /// Bath too large for the requested brute-force route.
    SbBathTooLarge = 6,
    /// A required pointer was null.
    SbNullPointer = 7,
    /// The library panicked; state on the handle is still valid.
    SbPanic = 8,
    /// Failure with no dedicated code.
    SbInternal = 9,
}

/// One bath spin: parameters plus its initial state amplitudes.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct SbBathSpin {
    /// Self-frequency (>= 0).
    pub omega: f64,
    /// Coupling to the central spin (>= 0).
    pub lambda: f64,
    pub amp0_re: f64,
    pub amp0_im: f64,
    pub amp1_re: f64,
    pub amp1_im: f64,
}

/// Complex number as a pair of doubles.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct SbComplex {
    pub re: f64,
    pub im: f64,
}

/// Result of a geometric-phase evaluation.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct SbGpResult {
    /// Accumulated phase, radians.
    pub phase: f64,
    /// Difference between the last two quadrature refinements.
    pub estimated_error: f64,
    /// Integrand evaluations spent.
    pub evaluations: u64,
}

/// Opaque bath handle.
pub struct SbBath {
    inner: Bath,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> =
        RefCell::new(CString::new("no error").expect("static text"));
}

fn set_last_error(message: &str) {
    let sanitized = message.replace('\0', " ");
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(sanitized).expect("nul bytes stripped");
    });
}

fn status_of(err: &Error) -> SbStatus {
    match err {
        Error::InvalidParam { .. } | Error::Config(_) => SbStatus::SbInvalidParam,
        Error::ComplexDecoherence { .. } => SbStatus::SbComplexDecoherence,
        Error::QuadratureNotConverged { .. } => SbStatus::SbQuadratureNotConverged,
        Error::EigenvalueCrossing { .. } => SbStatus::SbEigenvalueCrossing,
        Error::CoherenceOutOfRange { .. } => SbStatus::SbCoherenceOutOfRange,
        Error::BathTooLarge { .. } => SbStatus::SbBathTooLarge,
        Error::Io(_) => SbStatus::SbInternal,
    }
}

fn fail(err: &Error) -> SbStatus {
    set_last_error(&err.to_string());
    status_of(err)
}

/// Run `body` with panics converted to [`SbStatus::SbPanic`].
fn guarded(body: impl FnOnce() -> SbStatus) -> SbStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(status) => status,
        Err(_) => {
            set_last_error("panic crossed the C boundary");
            SbStatus::SbPanic
        }
    }
}

/// Static description of a status code. Never null.
#[no_mangle]
pub extern "C" fn sb_status_message(status: SbStatus) -> *const c_char {
    let text: &'static [u8] = match status {
        SbStatus::SbOk => b"ok\0",
        SbStatus::SbInvalidParam => b"invalid parameter\0",
        SbStatus::SbComplexDecoherence => b"decoherence factor is complex for this bath state\0",
        SbStatus::SbQuadratureNotConverged => b"quadrature refinement did not converge\0",
        SbStatus::SbEigenvalueCrossing => b"reduced-state eigenvalues crossed\0",
        SbStatus::SbCoherenceOutOfRange => b"coherence magnitude out of range\0",
        SbStatus::SbBathTooLarge => b"bath too large\0",
        SbStatus::SbNullPointer => b"null pointer argument\0",
        SbStatus::SbPanic => b"internal panic\0",
        SbStatus::SbInternal => b"internal error\0",
    };
    text.as_ptr().cast()
}

/// Thread-local message for the most recent failure on this thread.
/// Valid until the next failing call on the same thread. Never null.
#[no_mangle]
pub extern "C" fn sb_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Create a homogeneous bath: `n` spins at (`omega`, `lambda`), each in the
/// +1 eigenstate of its sigma-x. Writes the handle to `out`.
///
/// # Safety
/// `out` must be a valid pointer. The handle must be released with
/// [`sb_bath_free`].
#[no_mangle]
pub unsafe extern "C" fn sb_bath_new_homogeneous(
    n: usize,
    omega: f64,
    lambda: f64,
    out: *mut *mut SbBath,
) -> SbStatus {
    if out.is_null() {
        set_last_error("out handle pointer is null");
        return SbStatus::SbNullPointer;
    }
    guarded(|| match Bath::homogeneous(n, omega, lambda) {
        Ok(inner) => {
            unsafe { *out = Box::into_raw(Box::new(SbBath { inner })) };
            SbStatus::SbOk
        }
        Err(e) => fail(&e),
    })
}

/// Create a bath from `count` explicit spins. Writes the handle to `out`.
///
/// # Safety
/// `spins` must point to `count` readable elements; `out` must be valid.
/// The handle must be released with [`sb_bath_free`].
#[no_mangle]
pub unsafe extern "C" fn sb_bath_new(
    spins: *const SbBathSpin,
    count: usize,
    out: *mut *mut SbBath,
) -> SbStatus {
    if spins.is_null() || out.is_null() {
        set_last_error("spin array or out handle pointer is null");
        return SbStatus::SbNullPointer;
    }
    let raw = unsafe { std::slice::from_raw_parts(spins, count) };
    guarded(|| {
        let built: Result<Vec<_>, _> = raw
            .iter()
            .map(|s| {
                BathSpin::new(
                    s.omega,
                    s.lambda,
                    Complex64::new(s.amp0_re, s.amp0_im),
                    Complex64::new(s.amp1_re, s.amp1_im),
                )
            })
            .collect();
        match built.and_then(Bath::new) {
            Ok(inner) => {
                unsafe { *out = Box::into_raw(Box::new(SbBath { inner })) };
                SbStatus::SbOk
            }
            Err(e) => fail(&e),
        }
    })
}

/// Release a bath handle. Null is a no-op. The handle must not be used
/// afterwards.
///
/// # Safety
/// `bath` must be a handle from a constructor, released at most once.
#[no_mangle]
pub unsafe extern "C" fn sb_bath_free(bath: *mut SbBath) {
    if !bath.is_null() {
        drop(unsafe { Box::from_raw(bath) });
    }
}

/// Number of spins in the bath; 0 for a null handle.
///
/// # Safety
/// `bath` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sb_bath_len(bath: *const SbBath) -> usize {
    if bath.is_null() {
        0
    } else {
        unsafe { &*bath }.inner.len()
    }
}

/// Closed-form decoherence factor of the bath at time `t` (exact when every
/// spin starts in a sigma-x eigenstate).
///
/// # Safety
/// `bath` must be a live handle; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn sb_decoherence_factor(
    bath: *const SbBath,
    t: f64,
    out: *mut f64,
) -> SbStatus {
    if bath.is_null() || out.is_null() {
        set_last_error("bath handle or out pointer is null");
        return SbStatus::SbNullPointer;
    }
    let bath = unsafe { &*bath };
    guarded(|| {
        unsafe { *out = bath.inner.decoherence_factor(t) };
        SbStatus::SbOk
    })
}

/// Brute-force decoherence factor (valid for any initial bath state).
///
/// # Safety
/// `bath` must be a live handle; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn sb_decoherence_factor_exact(
    bath: *const SbBath,
    t: f64,
    out: *mut SbComplex,
) -> SbStatus {
    if bath.is_null() || out.is_null() {
        set_last_error("bath handle or out pointer is null");
        return SbStatus::SbNullPointer;
    }
    let bath = unsafe { &*bath };
    guarded(|| {
        let f = decoherence_factor_exact(&bath.inner, t);
        unsafe { *out = SbComplex { re: f.re, im: f.im } };
        SbStatus::SbOk
    })
}

/// Reduced density matrix of the central spin at time `t`, row-major into
/// `out[4]`, using the closed-form factor of `bath`.
///
/// # Safety
/// `bath` must be a live handle; `out` must point to 4 writable elements.
#[no_mangle]
pub unsafe extern "C" fn sb_reduced_density(
    central_omega: f64,
    theta0: f64,
    bath: *const SbBath,
    t: f64,
    out: *mut SbComplex,
) -> SbStatus {
    if bath.is_null() || out.is_null() {
        set_last_error("bath handle or out pointer is null");
        return SbStatus::SbNullPointer;
    }
    let bath = unsafe { &*bath };
    guarded(|| {
        let central = match CentralSpin::new(central_omega, theta0) {
            Ok(c) => c,
            Err(e) => return fail(&e),
        };
        let f = Complex64::new(bath.inner.decoherence_factor(t), 0.0);
        match reduced_density_matrix(&central, f, t) {
            Ok(rho) => {
                let cells = unsafe { std::slice::from_raw_parts_mut(out, 4) };
                for r in 0..2 {
                    for c in 0..2 {
                        cells[2 * r + c] = SbComplex {
                            re: rho.0[r][c].re,
                            im: rho.0[r][c].im,
                        };
                    }
                }
                SbStatus::SbOk
            }
            Err(e) => fail(&e),
        }
    })
}

/// Unitary one-cycle geometric phase pi(1 + cos theta0).
#[no_mangle]
pub extern "C" fn sb_unitary_gp(theta0: f64) -> f64 {
    unitary_gp(theta0)
}

fn quadrature_spec(tolerance: f64) -> QuadratureSpec {
    QuadratureSpec {
        tolerance,
        ..QuadratureSpec::default()
    }
}

type PhaseRoutine = fn(&CentralSpin, &Bath, usize, &QuadratureSpec) -> spinbath::Result<spinbath::GpResult>;

unsafe fn phase_entry(
    routine: PhaseRoutine,
    central_omega: f64,
    theta0: f64,
    bath: *const SbBath,
    cycles: u32,
    tolerance: f64,
    out: *mut SbGpResult,
) -> SbStatus {
    if bath.is_null() || out.is_null() {
        set_last_error("bath handle or out pointer is null");
        return SbStatus::SbNullPointer;
    }
    let bath = unsafe { &*bath };
    guarded(|| {
        let central = match CentralSpin::new(central_omega, theta0) {
            Ok(c) => c,
            Err(e) => return fail(&e),
        };
        match routine(&central, &bath.inner, cycles as usize, &quadrature_spec(tolerance)) {
            Ok(r) => {
                unsafe {
                    *out = SbGpResult {
                        phase: r.phase,
                        estimated_error: r.estimated_error,
                        evaluations: r.evaluations as u64,
                    }
                };
                SbStatus::SbOk
            }
            Err(e) => fail(&e),
        }
    })
}

/// Geometric phase over `cycles` quasi-cycles by direct quadrature.
/// Requires every bath spin to start in a sigma-x eigenstate.
///
/// # Safety
/// `bath` must be a live handle; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn sb_gp_exact(
    central_omega: f64,
    theta0: f64,
    bath: *const SbBath,
    cycles: u32,
    tolerance: f64,
    out: *mut SbGpResult,
) -> SbStatus {
    unsafe { phase_entry(gp_exact, central_omega, theta0, bath, cycles, tolerance, out) }
}

/// Geometric phase over `cycles` quasi-cycles from the kinematic
/// (eigenbranch) functional. Same preconditions as [`sb_gp_exact`].
///
/// # Safety
/// `bath` must be a live handle; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn sb_gp_kinematic(
    central_omega: f64,
    theta0: f64,
    bath: *const SbBath,
    cycles: u32,
    tolerance: f64,
    out: *mut SbGpResult,
) -> SbStatus {
    unsafe { phase_entry(gp_kinematic, central_omega, theta0, bath, cycles, tolerance, out) }
}

/// Quadratic weak-coupling approximation of the one-cycle phase for a
/// homogeneous bath of `n` spins at (`bath_omega`, `lambda`).
///
/// # Safety
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn sb_gp_perturbative(
    central_omega: f64,
    theta0: f64,
    n: usize,
    bath_omega: f64,
    lambda: f64,
    out: *mut f64,
) -> SbStatus {
    if out.is_null() {
        set_last_error("out pointer is null");
        return SbStatus::SbNullPointer;
    }
    guarded(|| {
        let central = match CentralSpin::new(central_omega, theta0) {
            Ok(c) => c,
            Err(e) => return fail(&e),
        };
        if !bath_omega.is_finite() || bath_omega <= 0.0 || !lambda.is_finite() || lambda < 0.0 || n == 0
        {
            let e = Error::InvalidParam {
                name: "bath",
                value: bath_omega,
                reason: "quadratic formula needs n >= 1, bath omega > 0, lambda >= 0",
            };
            return fail(&e);
        }
        unsafe { *out = gp_perturbative(&central, n, bath_omega, lambda) };
        SbStatus::SbOk
    })
}
