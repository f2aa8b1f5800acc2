//! Model parameters and closed-form reduced dynamics.
//!
//! The central spin has Hamiltonian (Ω/2)σᶻ and starts in
//! cos(θ₀/2)|0⟩ + sin(θ₀/2)|1⟩. Each bath spin evolves under ωᵢσᵢˣ and
//! couples through λᵢ σᶻ⊗σᵢᶻ. Because the coupling commutes with the system
//! Hamiltonian the populations never move; the bath enters only through the
//! decoherence factor F(t) multiplying the coherence.
//!
//! For bath spins initialized in σˣ eigenstates F(t) has the closed form
//!
//! ```text
//! F(t) = prod_i [ 1 - (2 lambda_i^2 / (omega_i^2 + lambda_i^2))
//!                     * sin^2(sqrt(omega_i^2 + lambda_i^2) t) ]
//! ```
//!
//! For other initial states F(t) acquires an imaginary part; the brute-force
//! evaluation lives in [`crate::oracle`].

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::mat2::Mat2;

/// Largest tolerated |F| overshoot before a coherence value is rejected.
pub const COHERENCE_TOL: f64 = 1e-12;

/// Largest tolerated Bloch-vector component before an initial bath state no
/// longer counts as a σˣ eigenstate.
const SIGMA_X_EIGENSTATE_TOL: f64 = 1e-10;

/// Central qubit: level splitting and initial Bloch polar angle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CentralSpin {
    pub omega: f64,
    pub theta0: f64,
}

impl CentralSpin {
    pub fn new(omega: f64, theta0: f64) -> Result<Self> {
        if !omega.is_finite() || omega <= 0.0 {
            return Err(Error::InvalidParam {
                name: "omega",
                value: omega,
                reason: "central-spin frequency must be positive and finite",
            });
        }
        if !(0.0..=std::f64::consts::PI).contains(&theta0) {
            return Err(Error::InvalidParam {
                name: "theta0",
                value: theta0,
                reason: "initial Bloch angle must lie in [0, pi]",
            });
        }
        Ok(CentralSpin { omega, theta0 })
    }

    /// Amplitude on |0⟩ of the initial state.
    pub fn alpha(&self) -> f64 {
        (0.5 * self.theta0).cos()
    }

    /// Amplitude on |1⟩ of the initial state.
    pub fn beta(&self) -> f64 {
        (0.5 * self.theta0).sin()
    }

    /// Quasi-cycle period τ = 2π/Ω.
    pub fn cycle_period(&self) -> f64 {
        std::f64::consts::TAU / self.omega
    }
}

/// One bath spin: self-frequency, coupling, and initial pure state in the
/// σᶻ basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BathSpin {
    pub omega: f64,
    pub lambda: f64,
    pub amp0: Complex64,
    pub amp1: Complex64,
}

impl BathSpin {
    pub fn new(omega: f64, lambda: f64, amp0: Complex64, amp1: Complex64) -> Result<Self> {
        if !omega.is_finite() || omega < 0.0 {
            return Err(Error::InvalidParam {
                name: "bath omega",
                value: omega,
                reason: "bath-spin frequency must be nonnegative and finite",
            });
        }
        if !lambda.is_finite() || lambda < 0.0 {
            return Err(Error::InvalidParam {
                name: "bath lambda",
                value: lambda,
                reason: "coupling must be nonnegative and finite",
            });
        }
        let norm = amp0.norm_sqr() + amp1.norm_sqr();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParam {
                name: "bath state norm",
                value: norm,
                reason: "initial amplitudes must be normalized within 1e-12",
            });
        }
        Ok(BathSpin {
            omega,
            lambda,
            amp0,
            amp1,
        })
    }

    /// Spin initialized in the +1 eigenstate of σˣ, the state for which the
    /// closed-form factor is exact.
    pub fn sigma_x_plus(omega: f64, lambda: f64) -> Result<Self> {
        let a = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        BathSpin::new(omega, lambda, a, a)
    }

    /// Oscillation rate √(ω² + λ²) of this spin's contribution to F(t).
    pub fn dressed_frequency(&self) -> f64 {
        self.omega.hypot(self.lambda)
    }

    /// Closed-form contribution to F(t):
    /// 1 − [2λ²/(ω²+λ²)]·sin²(√(ω²+λ²)·t).
    ///
    /// The degenerate spin ω = λ = 0 contributes 1, the λ → 0 limit of the
    /// 0/0 prefactor.
    pub fn single_spin_factor(&self, t: f64) -> f64 {
        let r = self.dressed_frequency();
        if r == 0.0 {
            return 1.0;
        }
        let depth = 2.0 * self.lambda * self.lambda / (r * r);
        let s = (r * t).sin();
        1.0 - depth * s * s
    }

    pub fn sigma_y_expectation(&self) -> f64 {
        2.0 * (self.amp0.conj() * self.amp1).im
    }

    pub fn sigma_z_expectation(&self) -> f64 {
        self.amp0.norm_sqr() - self.amp1.norm_sqr()
    }

    /// True when the initial state is a σˣ eigenstate (either sign), the
    /// regime where F(t) is real and the closed form is exact.
    pub fn is_sigma_x_eigenstate(&self) -> bool {
        self.sigma_y_expectation().abs() < SIGMA_X_EIGENSTATE_TOL
            && self.sigma_z_expectation().abs() < SIGMA_X_EIGENSTATE_TOL
    }
}

/// Ordered collection of bath spins.
#[derive(Debug, Clone, PartialEq)]
pub struct Bath {
    spins: Vec<BathSpin>,
}

impl Bath {
    pub fn new(spins: Vec<BathSpin>) -> Result<Self> {
        if spins.is_empty() {
            return Err(Error::InvalidParam {
                name: "bath size",
                value: 0.0,
                reason: "bath must contain at least one spin",
            });
        }
        Ok(Bath { spins })
    }

    /// N identical spins in the σˣ eigenstate.
    pub fn homogeneous(n: usize, omega: f64, lambda: f64) -> Result<Self> {
        let spin = BathSpin::sigma_x_plus(omega, lambda)?;
        Bath::new(vec![spin; n])
    }

    /// N identical spins sharing an arbitrary initial state.
    pub fn homogeneous_with_state(
        n: usize,
        omega: f64,
        lambda: f64,
        amp0: Complex64,
        amp1: Complex64,
    ) -> Result<Self> {
        let spin = BathSpin::new(omega, lambda, amp0, amp1)?;
        Bath::new(vec![spin; n])
    }

    pub fn spins(&self) -> &[BathSpin] {
        &self.spins
    }

    pub fn len(&self) -> usize {
        self.spins.len()
    }

    pub fn is_empty(&self) -> bool {
        self.spins.is_empty()
    }

    pub fn all_sigma_x_eigenstates(&self) -> bool {
        self.spins.iter().all(BathSpin::is_sigma_x_eigenstate)
    }

    /// (N, ω, λ) when every spin is identical and σˣ-initialized, the only
    /// shape the quadratic phase correction formula describes.
    pub fn homogeneous_parameters(&self) -> Option<(usize, f64, f64)> {
        let first = self.spins[0];
        if first.is_sigma_x_eigenstate() && self.spins.iter().all(|s| *s == first) {
            Some((self.spins.len(), first.omega, first.lambda))
        } else {
            None
        }
    }

    /// Fastest dressed frequency in the bath; sets the quadrature step.
    pub fn max_dressed_frequency(&self) -> f64 {
        self.spins
            .iter()
            .map(BathSpin::dressed_frequency)
            .fold(0.0, f64::max)
    }

    /// Closed-form decoherence factor, the product over all spins.
    pub fn decoherence_factor(&self, t: f64) -> f64 {
        self.spins
            .iter()
            .map(|s| s.single_spin_factor(t))
            .product()
    }

    /// Empirical time average and dispersion (standard deviation) of F over
    /// `samples` midpoints of a uniform partition of [0, horizon].
    ///
    /// Accumulation is Welford's, so the variance stays accurate even when
    /// F hovers near a constant.
    pub fn mean_time_averaged_factor(&self, horizon: f64, samples: usize) -> Result<(f64, f64)> {
        if !horizon.is_finite() || horizon <= 0.0 {
            return Err(Error::InvalidParam {
                name: "horizon",
                value: horizon,
                reason: "averaging horizon must be positive and finite",
            });
        }
        if samples < 2 {
            return Err(Error::InvalidParam {
                name: "samples",
                value: samples as f64,
                reason: "need at least 2 samples for a dispersion",
            });
        }
        let dt = horizon / samples as f64;
        let mut mean = 0.0;
        let mut m2 = 0.0;
        for k in 0..samples {
            let t = (k as f64 + 0.5) * dt;
            let f = self.decoherence_factor(t);
            let delta = f - mean;
            mean += delta / (k as f64 + 1.0);
            m2 += delta * (f - mean);
        }
        Ok((mean, (m2 / samples as f64).sqrt()))
    }
}

/// Reduced density matrix of the central spin given a decoherence value.
///
/// The coherence is αβ·f·e^{−iΩt}, carrying the free dynamical phase
/// explicitly so downstream phase functionals see the full time dependence.
pub fn reduced_density_matrix(central: &CentralSpin, f: Complex64, t: f64) -> Result<Mat2> {
    let mag = f.norm();
    if mag > 1.0 + COHERENCE_TOL {
        return Err(Error::CoherenceOutOfRange { magnitude: mag });
    }
    let a = central.alpha();
    let b = central.beta();
    let phase = Complex64::from_polar(1.0, -central.omega * t);
    let coherence = a * b * f * phase;
    Ok(Mat2::new([
        [Complex64::new(a * a, 0.0), coherence],
        [coherence.conj(), Complex64::new(b * b, 0.0)],
    ]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_2, PI, SQRT_2, TAU};

    #[test]
    fn dressed_frequency_matches_hand_values() {
        let plain = BathSpin::sigma_x_plus(1.0, 0.0).unwrap();
        assert_eq!(plain.dressed_frequency(), 1.0);
        let degenerate = BathSpin::sigma_x_plus(0.0, 0.0).unwrap();
        assert_eq!(degenerate.dressed_frequency(), 0.0);
        let pythagorean = BathSpin::sigma_x_plus(3.0, 4.0).unwrap();
        assert_abs_diff_eq!(pythagorean.dressed_frequency(), 5.0, epsilon = 1e-15);
    }

    #[test]
    fn uncoupled_spin_never_decoheres() {
        let spin = BathSpin::sigma_x_plus(1.0, 0.0).unwrap();
        for t in [0.0, 0.3, 2.0, 17.5] {
            assert_eq!(spin.single_spin_factor(t), 1.0);
        }
    }

    #[test]
    fn factor_zero_at_quarter_dressed_period_for_equal_couplings() {
        // omega = lambda makes the modulation depth 1, so the factor touches
        // zero when the dressed phase reaches pi/2.
        let spin = BathSpin::sigma_x_plus(1.0, 1.0).unwrap();
        let t = PI / (2.0 * SQRT_2);
        assert_abs_diff_eq!(spin.single_spin_factor(t), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn factor_is_one_at_time_zero() {
        let spin = BathSpin::new(
            0.7,
            1.3,
            Complex64::new(0.6, 0.0),
            Complex64::new(0.0, 0.8),
        )
        .unwrap();
        assert_eq!(spin.single_spin_factor(0.0), 1.0);
    }

    #[test]
    fn degenerate_spin_contributes_unity() {
        let spin = BathSpin::sigma_x_plus(0.0, 0.0).unwrap();
        assert_eq!(spin.single_spin_factor(3.7), 1.0);
    }

    #[test]
    fn bath_factor_is_product_of_spin_factors() {
        let bath = Bath::homogeneous(2, 1.0, 1.0).unwrap();
        assert_eq!(bath.decoherence_factor(0.0), 1.0);
        let t = PI / (2.0 * SQRT_2);
        assert_abs_diff_eq!(bath.decoherence_factor(t), 0.0, epsilon = 1e-12);

        let decoupled = Bath::homogeneous(3, 1.0, 0.0).unwrap();
        for t in [0.1, 1.0, 9.0] {
            assert_eq!(decoupled.decoherence_factor(t), 1.0);
        }
    }

    #[test]
    fn log_domain_product_agrees_with_direct_product() {
        // Weak coupling keeps every factor positive, so the product can be
        // evaluated as exp(sum of logs) and compared.
        let bath = Bath::homogeneous(1000, 1.0, 0.05).unwrap();
        for t in [0.37, 1.9, 12.3, 51.7] {
            let direct = bath.decoherence_factor(t);
            let logsum: f64 = bath
                .spins()
                .iter()
                .map(|s| s.single_spin_factor(t).ln())
                .sum();
            let via_log = logsum.exp();
            assert!(
                (direct - via_log).abs() <= 1e-10 * via_log.abs(),
                "t={t}: direct={direct}, exp-log={via_log}"
            );
        }
    }

    #[test]
    fn long_time_average_matches_analytic_mean() {
        // For one spin the time average of sin^2 is 1/2, so the mean factor
        // tends to 1 - lambda^2/(omega^2 + lambda^2) = 1/2 at omega = lambda.
        let bath = Bath::homogeneous(1, 1.0, 1.0).unwrap();
        let (mean, dispersion) = bath
            .mean_time_averaged_factor(1e4 * TAU, 1_000_000)
            .unwrap();
        assert_abs_diff_eq!(mean, 0.5, epsilon = 0.01);
        // F = 1/2 + (1/2)cos(2rt) has variance 1/8.
        assert_abs_diff_eq!(dispersion, 0.125f64.sqrt(), epsilon = 0.01);
    }

    #[test]
    fn uncoupled_bath_has_unit_mean_and_zero_dispersion() {
        let bath = Bath::homogeneous(1, 1.0, 0.0).unwrap();
        let (mean, dispersion) = bath.mean_time_averaged_factor(100.0, 1000).unwrap();
        assert_eq!(mean, 1.0);
        assert_eq!(dispersion, 0.0);
    }

    #[test]
    fn averaging_rejects_bad_windows() {
        let bath = Bath::homogeneous(1, 1.0, 0.5).unwrap();
        assert!(bath.mean_time_averaged_factor(0.0, 100).is_err());
        assert!(bath.mean_time_averaged_factor(-1.0, 100).is_err());
        assert!(bath.mean_time_averaged_factor(10.0, 1).is_err());
    }

    #[test]
    fn reduced_density_examples() {
        let one = Complex64::new(1.0, 0.0);

        let pole = CentralSpin::new(1.0, 0.0).unwrap();
        let rho = reduced_density_matrix(&pole, Complex64::new(0.3, 0.1), 2.0).unwrap();
        assert_abs_diff_eq!(rho.0[0][0].re, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(rho.0[0][1].norm(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(rho.0[1][1].re, 0.0, epsilon = 1e-15);

        let equator = CentralSpin::new(1.0, FRAC_PI_2).unwrap();
        let rho = reduced_density_matrix(&equator, one, 0.0).unwrap();
        for row in rho.0 {
            for entry in row {
                assert_abs_diff_eq!(entry.re, 0.5, epsilon = 1e-15);
                assert_abs_diff_eq!(entry.im, 0.0, epsilon = 1e-15);
            }
        }

        let rho = reduced_density_matrix(&equator, Complex64::new(0.0, 0.0), 1.0).unwrap();
        assert_abs_diff_eq!(rho.0[0][0].re, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(rho.0[0][1].norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn reduced_density_is_a_state_and_pure_at_unit_factor() {
        let central = CentralSpin::new(1.0, 1.1).unwrap();
        let rho = reduced_density_matrix(&central, Complex64::new(1.0, 0.0), 0.7).unwrap();
        assert!(rho.hermiticity_defect() < 1e-15);
        assert_abs_diff_eq!(rho.trace().re, 1.0, epsilon = 1e-15);
        let eig = rho.eig_hermitian();
        assert_abs_diff_eq!(eig.values[0] + eig.values[1], 1.0, epsilon = 1e-13);
        assert_abs_diff_eq!(eig.values[1], 0.0, epsilon = 1e-12);
    }

    #[test]
    fn overlarge_coherence_is_rejected() {
        let central = CentralSpin::new(1.0, FRAC_PI_2).unwrap();
        let err = reduced_density_matrix(&central, Complex64::new(1.0 + 1e-6, 0.0), 0.0)
            .unwrap_err();
        assert!(matches!(err, Error::CoherenceOutOfRange { .. }));
    }

    #[test]
    fn constructors_enforce_ranges() {
        assert!(CentralSpin::new(0.0, 1.0).is_err());
        assert!(CentralSpin::new(-1.0, 1.0).is_err());
        assert!(CentralSpin::new(1.0, -0.1).is_err());
        assert!(CentralSpin::new(1.0, PI + 0.1).is_err());
        assert!(CentralSpin::new(1.0, PI).is_ok());

        assert!(BathSpin::sigma_x_plus(-0.1, 0.2).is_err());
        assert!(BathSpin::sigma_x_plus(0.2, -0.1).is_err());
        let unnormalized = BathSpin::new(
            1.0,
            1.0,
            Complex64::new(1.0, 0.0),
            Complex64::new(0.5, 0.0),
        );
        assert!(unnormalized.is_err());

        assert!(Bath::new(vec![]).is_err());
        assert!(Bath::homogeneous_with_state(
            0,
            1.0,
            0.1,
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 0.0)
        )
        .is_err());
    }

    #[test]
    fn sigma_x_eigenstate_detection() {
        let plus = BathSpin::sigma_x_plus(1.0, 0.5).unwrap();
        assert!(plus.is_sigma_x_eigenstate());

        let s = std::f64::consts::FRAC_1_SQRT_2;
        let minus = BathSpin::new(
            1.0,
            0.5,
            Complex64::new(s, 0.0),
            Complex64::new(-s, 0.0),
        )
        .unwrap();
        assert!(minus.is_sigma_x_eigenstate());

        let up = BathSpin::new(
            1.0,
            0.5,
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 0.0),
        )
        .unwrap();
        assert!(!up.is_sigma_x_eigenstate());

        let y_plus = BathSpin::new(
            1.0,
            0.5,
            Complex64::new(s, 0.0),
            Complex64::new(0.0, s),
        )
        .unwrap();
        assert!(!y_plus.is_sigma_x_eigenstate());
    }

    #[test]
    fn central_spin_amplitudes_and_period() {
        let c = CentralSpin::new(2.0, FRAC_PI_2).unwrap();
        assert_abs_diff_eq!(c.alpha(), (PI / 4.0).cos(), epsilon = 1e-15);
        assert_abs_diff_eq!(c.beta(), (PI / 4.0).sin(), epsilon = 1e-15);
        assert_abs_diff_eq!(c.cycle_period(), PI, epsilon = 1e-15);
    }

    proptest! {
        #[test]
        fn factor_magnitude_never_exceeds_one(
            omega in 0.0..3.0f64,
            lambda in 0.0..3.0f64,
            t in 0.0..50.0f64,
        ) {
            let spin = BathSpin::sigma_x_plus(omega, lambda).unwrap();
            prop_assert!(spin.single_spin_factor(t).abs() <= 1.0 + 1e-15);
        }

        #[test]
        fn factor_is_periodic_with_dressed_half_period(
            omega in 0.1..3.0f64,
            lambda in 0.0..3.0f64,
            t in 0.0..10.0f64,
        ) {
            let spin = BathSpin::sigma_x_plus(omega, lambda).unwrap();
            let period = PI / spin.dressed_frequency();
            let a = spin.single_spin_factor(t);
            let b = spin.single_spin_factor(t + period);
            prop_assert!((a - b).abs() < 1e-12, "a={a}, b={b}");
        }

        #[test]
        fn bath_factor_is_one_at_time_zero(
            n in 1usize..20,
            omega in 0.0..3.0f64,
            lambda in 0.0..3.0f64,
        ) {
            let bath = Bath::homogeneous(n, omega, lambda).unwrap();
            prop_assert_eq!(bath.decoherence_factor(0.0), 1.0);
        }
    }
}
