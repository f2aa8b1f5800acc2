//! Geometric phase of the dephasing central spin.
//!
//! Three routes to the same quantity:
//!
//! * [`gp_exact`]: Ω ∫₀^{mτ} cos²(θ₊(t)) dt with tan θ₊ = tan(θ₀/2)/F(t),
//!   evaluated by composite Simpson with oscillation-aware step control.
//! * [`gp_kinematic`]: the mixed-state functional
//!   arg{ √(ε₊(0)ε₊(T)) ⟨Ψ₊(0)|Ψ₊(T)⟩ · e^{−∫⟨Ψ₊|∂ₜΨ₊⟩dt} } evaluated over
//!   the eigenbranch family |Ψ₊(t)⟩ = (e^{−iΩt}cos θ₊, sin θ₊); reduces to
//!   the integral above for real F and cross-checks it to 1e-6.
//! * [`gp_perturbative`]: the closed quadratic-in-λ expansion for a
//!   homogeneous bath.
//!
//! Phases are reported unwrapped (accumulated), not reduced mod 2π, so
//! multi-cycle runs scale visibly with the winding number.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::model::{reduced_density_matrix, Bath, CentralSpin};

/// Sign of the quadratic coupling correction to the one-cycle phase.
///
/// Since |F(t)| ≤ 1, tan θ₊ = tan(θ₀/2)/F can only grow in magnitude, so
/// cos²θ₊ shrinks pointwise and the cycle integral drops below its unitary
/// value: the correction is negative. The sign-determination suite in
/// [`crate::validate`] re-derives this empirically (quadrature vs unitary
/// value at weak coupling, many configurations) on every run; it is frozen
/// here as a named constant rather than folded into the formula so that the
/// determination stays visible and testable.
pub const PERTURBATIVE_CORRECTION_SIGN: f64 = -1.0;

/// Eigenvalue gap below which branch tracking is refused.
const CROSSING_GAP_TOL: f64 = 1e-12;

/// Step-control parameters for the phase quadratures.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    /// Sample density relative to the fastest oscillation period.
    pub points_per_period: usize,
    /// Absolute tolerance on the phase, in radians.
    pub tolerance: f64,
    /// Maximum number of step halvings.
    pub refinement_limit: u32,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            points_per_period: 64,
            tolerance: 1e-9,
            refinement_limit: 14,
        }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        if self.points_per_period < 16 {
            return Err(Error::InvalidParam {
                name: "points_per_period",
                value: self.points_per_period as f64,
                reason: "need at least 16 samples per oscillation period",
            });
        }
        if !self.tolerance.is_finite() || self.tolerance <= 0.0 {
            return Err(Error::InvalidParam {
                name: "tolerance",
                value: self.tolerance,
                reason: "quadrature tolerance must be positive and finite",
            });
        }
        if self.refinement_limit == 0 {
            return Err(Error::InvalidParam {
                name: "refinement_limit",
                value: 0.0,
                reason: "at least one refinement is needed for an error estimate",
            });
        }
        Ok(())
    }
}

/// A converged phase value with its quadrature metadata.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GpResult {
    /// Unwrapped phase in radians.
    pub phase: f64,
    /// Difference between the last two refinements, in radians.
    pub estimated_error: f64,
    /// Total integrand evaluations across refinements.
    pub evaluations: usize,
}

/// cos²(θ₊) for tan θ₊ = tan(θ₀/2)/f, in the even-in-f form
/// f²cos²(θ₀/2) / (f²cos²(θ₀/2) + sin²(θ₀/2)).
///
/// Total: at f = 0 with θ₀ > 0 the branch sits at the equator and the value
/// is 0; the doubly-degenerate corner θ₀ = 0, f = 0 returns 1, the limit
/// along θ₀ = 0 where the branch never leaves the pole.
pub fn theta_plus_cos2(theta0: f64, f: f64) -> f64 {
    let c = (0.5 * theta0).cos();
    let s = (0.5 * theta0).sin();
    let num = f * f * c * c;
    let den = num + s * s;
    if den == 0.0 {
        return 1.0;
    }
    num / den
}

/// Closed-cycle phase of an isolated spin-1/2: π(1 + cos θ₀).
pub fn unitary_gp(theta0: f64) -> f64 {
    PI * (1.0 + theta0.cos())
}

fn require_cycles(cycles: usize) -> Result<()> {
    if cycles == 0 {
        return Err(Error::InvalidParam {
            name: "cycles",
            value: 0.0,
            reason: "phase accumulation needs at least one cycle",
        });
    }
    Ok(())
}

/// The real-F regime is exactly the σˣ-eigenstate bath; anything else makes
/// F complex and the θ₊ parametrization meaningless.
fn require_real_factor(bath: &Bath) -> Result<()> {
    let worst = bath
        .spins()
        .iter()
        .map(|s| {
            s.sigma_y_expectation()
                .abs()
                .max(s.sigma_z_expectation().abs())
        })
        .fold(0.0, f64::max);
    if worst >= 1e-10 {
        return Err(Error::ComplexDecoherence {
            imag_magnitude: worst,
        });
    }
    Ok(())
}

/// Even interval count such that the step is at most
/// (π / fastest frequency) / points_per_period.
fn initial_intervals(t_end: f64, fastest: f64, points_per_period: usize) -> usize {
    let period = PI / fastest;
    let raw = (t_end * points_per_period as f64 / period).ceil() as usize;
    let n = raw.max(4);
    n + n % 2
}

/// Composite Simpson on [0, t_end] with n intervals (n even). Nodes are
/// generated as t_end·j/n so that symmetric fractions of the interval land
/// on exact grid points.
fn simpson<G: Fn(f64) -> f64>(g: &G, t_end: f64, n: usize) -> f64 {
    debug_assert!(n >= 2 && n.is_multiple_of(2));
    let mut sum = g(0.0) + g(t_end);
    for j in 1..n {
        let w = if j % 2 == 1 { 4.0 } else { 2.0 };
        sum += w * g(t_end * j as f64 / n as f64);
    }
    sum * t_end / (3.0 * n as f64)
}

/// Phase over `cycles` quasi-cycles by direct quadrature:
/// Ω ∫₀^{cycles·τ} cos²(θ₊(t)) dt, τ = 2π/Ω.
///
/// The step starts at points_per_period samples per fastest oscillation
/// (the larger of the dressed frequencies and Ω) and halves until two
/// successive estimates agree within tolerance.
pub fn gp_exact(
    central: &CentralSpin,
    bath: &Bath,
    cycles: usize,
    spec: &QuadratureSpec,
) -> Result<GpResult> {
    spec.validate()?;
    require_cycles(cycles)?;
    require_real_factor(bath)?;

    let t_end = cycles as f64 * central.cycle_period();
    let fastest = bath.max_dressed_frequency().max(central.omega);
    let g = |t: f64| theta_plus_cos2(central.theta0, bath.decoherence_factor(t));

    let mut n = initial_intervals(t_end, fastest, spec.points_per_period);
    let mut prev = simpson(&g, t_end, n);
    let mut evaluations = n + 1;
    for _ in 0..spec.refinement_limit {
        n *= 2;
        let next = simpson(&g, t_end, n);
        evaluations += n + 1;
        let err = central.omega * (next - prev).abs();
        if err < spec.tolerance {
            return Ok(GpResult {
                phase: central.omega * next,
                estimated_error: err,
                evaluations,
            });
        }
        prev = next;
    }
    Err(Error::QuadratureNotConverged {
        last_error: central.omega * (simpson(&g, t_end, n) - prev).abs(),
        tolerance: spec.tolerance,
        refinements: spec.refinement_limit,
    })
}

/// One kinematic-functional evaluation on a fixed grid of n+1 nodes.
fn kinematic_on_grid(
    central: &CentralSpin,
    bath: &Bath,
    t_end: f64,
    n: usize,
) -> Result<f64> {
    let h = t_end / n as f64;
    let pole_state = central.theta0 == 0.0;

    let mut branch: Vec<[Complex64; 2]> = Vec::with_capacity(n + 1);
    for j in 0..=n {
        let t = t_end * j as f64 / n as f64;
        let f = bath.decoherence_factor(t);

        // Branch tracking needs a nondegenerate spectrum; the gap closes
        // only where the state hits the maximally mixed point.
        let rho = reduced_density_matrix(central, Complex64::new(f, 0.0), t)?;
        let eig = rho.eig_hermitian();
        let gap = eig.values[0] - eig.values[1];
        if gap < CROSSING_GAP_TOL {
            return Err(Error::EigenvalueCrossing { t, gap });
        }

        // atan2 keeps theta_plus in (0, pi) through F sign changes; the
        // pole state has no coherence and its branch never moves.
        let theta_plus = if pole_state {
            0.0
        } else {
            f64::atan2(central.beta(), central.alpha() * f)
        };
        let dyn_phase = Complex64::from_polar(1.0, -central.omega * t);
        branch.push([
            dyn_phase * theta_plus.cos(),
            Complex64::new(theta_plus.sin(), 0.0),
        ]);
    }

    // d|Ψ₊⟩/dt: central differences inside, second-order one-sided at the
    // ends; then the connection ∫⟨Ψ₊|∂ₜΨ₊⟩ dt by the trapezoid rule.
    let derivative = |j: usize| -> [Complex64; 2] {
        let two_h = 2.0 * h;
        let mut d = [Complex64::new(0.0, 0.0); 2];
        for (k, dk) in d.iter_mut().enumerate() {
            *dk = if j == 0 {
                (-3.0 * branch[0][k] + 4.0 * branch[1][k] - branch[2][k]) / two_h
            } else if j == n {
                (3.0 * branch[n][k] - 4.0 * branch[n - 1][k] + branch[n - 2][k]) / two_h
            } else {
                (branch[j + 1][k] - branch[j - 1][k]) / two_h
            };
        }
        d
    };

    let mut connection = Complex64::new(0.0, 0.0);
    for (j, node) in branch.iter().enumerate() {
        let d = derivative(j);
        let overlap = node[0].conj() * d[0] + node[1].conj() * d[1];
        let w = if j == 0 || j == n { 0.5 } else { 1.0 };
        connection += overlap * w;
    }
    connection *= h;

    let endpoint =
        branch[0][0].conj() * branch[n][0] + branch[0][1].conj() * branch[n][1];

    // The functional is arg{ sqrt(eps weights) * endpoint * e^{-connection} }
    // with positive weights; the connection is purely imaginary for a
    // normalized branch, so its contribution is the unwrapped -Im part,
    // and only the endpoint overlap is reduced to its principal argument.
    // Taking a single principal argument of the whole product instead would
    // fold multi-cycle phases back into (-pi, pi].
    Ok(-connection.im + endpoint.arg())
}

/// Phase over `cycles` quasi-cycles from the mixed-state kinematic
/// functional, evaluated on the ε₊ eigenbranch of the reduced state.
///
/// ε₋(0) = 0 for a pure initial state, so only the ε₊ branch contributes.
/// Degenerate points (ε₊ = ε₋ on the grid) are reported as errors rather
/// than interpolated through.
pub fn gp_kinematic(
    central: &CentralSpin,
    bath: &Bath,
    cycles: usize,
    spec: &QuadratureSpec,
) -> Result<GpResult> {
    spec.validate()?;
    require_cycles(cycles)?;
    require_real_factor(bath)?;

    let t_end = cycles as f64 * central.cycle_period();
    let fastest = bath.max_dressed_frequency().max(central.omega);

    let mut n = initial_intervals(t_end, fastest, spec.points_per_period);
    let mut prev = kinematic_on_grid(central, bath, t_end, n)?;
    let mut evaluations = n + 1;
    for _ in 0..spec.refinement_limit {
        n *= 2;
        let next = kinematic_on_grid(central, bath, t_end, n)?;
        evaluations += n + 1;
        let err = (next - prev).abs();
        if err < spec.tolerance {
            return Ok(GpResult {
                phase: next,
                estimated_error: err,
                evaluations,
            });
        }
        prev = next;
    }
    Err(Error::QuadratureNotConverged {
        last_error: (kinematic_on_grid(central, bath, t_end, n)? - prev).abs(),
        tolerance: spec.tolerance,
        refinements: spec.refinement_limit,
    })
}

/// Quadratic-in-coupling expansion of the one-cycle phase for a homogeneous
/// bath of n spins:
///
/// ```text
/// pi(1 + cos theta0)
///   + sign * n (lambda/omega)^2 sin^2(theta0)
///     * [ pi - (Omega/(4 omega)) sin(4 pi omega / Omega) ]
/// ```
///
/// with sign = [`PERTURBATIVE_CORRECTION_SIGN`]. Requires omega > 0; the
/// correction depends on n and lambda only through n·(λ/ω)².
pub fn gp_perturbative(central: &CentralSpin, n: usize, omega: f64, lambda: f64) -> f64 {
    let ratio = lambda / omega;
    let sin_theta0 = central.theta0.sin();
    let bracket =
        PI - central.omega / (4.0 * omega) * (4.0 * PI * omega / central.omega).sin();
    unitary_gp(central.theta0)
        + PERTURBATIVE_CORRECTION_SIGN
            * n as f64
            * ratio
            * ratio
            * sin_theta0
            * sin_theta0
            * bracket
}

/// One-cycle deviations from the unitary phase: always the quadrature
/// branch, plus the perturbative branch when the bath has homogeneous
/// σˣ-initialized parameters to feed the closed formula.
pub fn gp_deviation(
    central: &CentralSpin,
    bath: &Bath,
    spec: &QuadratureSpec,
) -> Result<(f64, Option<f64>)> {
    let exact = gp_exact(central, bath, 1, spec)?.phase;
    let unitary = unitary_gp(central.theta0);
    let pert = bath
        .homogeneous_parameters()
        .map(|(n, omega, lambda)| gp_perturbative(central, n, omega, lambda) - unitary);
    Ok((exact - unitary, pert))
}
