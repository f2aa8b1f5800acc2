//! Self-check suites: every closed form in the crate re-derived against an
//! independent route on seeded random inputs.
//!
//! Five suites, in dependency order:
//!
//! 1. product-form F(t) against the brute-force two-route propagator,
//! 2. factorized reduced density matrix against the full-Hilbert partial
//!    trace,
//! 3. kinematic phase functional against direct quadrature,
//! 4. order of the residual left after subtracting the quadratic phase
//!    correction (doubling λ must shrink it like λ⁴),
//! 5. empirical determination of the correction sign from weakly coupled
//!    baths.
//!
//! Each suite reports its worst observed value next to the threshold it is
//! held to, so a failure is diagnosable from the report alone.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::model::{reduced_density_matrix, Bath, BathSpin, CentralSpin};
use crate::oracle::{decoherence_factor_exact, full_hilbert_reduced_density};
use crate::phase::{
    gp_exact, gp_kinematic, gp_perturbative, unitary_gp, QuadratureSpec,
    PERTURBATIVE_CORRECTION_SIGN,
};

/// Which way a suite's observed value must fall relative to its threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// Pass iff observed < threshold (error bounds).
    Below,
    /// Pass iff observed > threshold (ratios and margins).
    Above,
}

/// Outcome of one suite.
#[derive(Debug, Clone)]
pub struct SuiteReport {
    pub name: &'static str,
    /// Worst value observed across the suite's random draws.
    pub observed: f64,
    pub threshold: f64,
    pub direction: Direction,
    pub passed: bool,
    /// Evidence line: sample counts, ranges, determined constants.
    pub detail: String,
}

impl SuiteReport {
    fn judge(
        name: &'static str,
        observed: f64,
        threshold: f64,
        direction: Direction,
        detail: String,
    ) -> Self {
        let passed = match direction {
            Direction::Below => observed < threshold,
            Direction::Above => observed > threshold,
        };
        SuiteReport {
            name,
            observed,
            threshold,
            direction,
            passed,
            detail,
        }
    }

    /// `observed=... threshold<... pass` line used by the CLI report.
    pub fn render(&self) -> String {
        let cmp = match self.direction {
            Direction::Below => '<',
            Direction::Above => '>',
        };
        format!(
            "{}: observed={:.3e} threshold{}{:.3e} {} ({})",
            self.name,
            self.observed,
            cmp,
            self.threshold,
            if self.passed { "pass" } else { "FAIL" },
            self.detail,
        )
    }
}

fn random_sigma_x_bath(rng: &mut impl Rng, n: usize) -> Bath {
    let spins = (0..n)
        .map(|_| {
            let omega = rng.gen_range(1e-3..=2.0);
            let lambda = rng.gen_range(1e-3..=2.0);
            BathSpin::sigma_x_plus(omega, lambda).expect("positive parameters")
        })
        .collect();
    Bath::new(spins).expect("n >= 1")
}

fn random_unit_state(rng: &mut impl Rng) -> (Complex64, Complex64) {
    loop {
        let a0 = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let a1 = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let norm = (a0.norm_sqr() + a1.norm_sqr()).sqrt();
        if norm > 0.1 {
            return (a0 / norm, a1 / norm);
        }
    }
}

fn random_generic_bath(rng: &mut impl Rng, n: usize) -> Bath {
    let spins = (0..n)
        .map(|_| {
            let omega = rng.gen_range(1e-3..=2.0);
            let lambda = rng.gen_range(1e-3..=2.0);
            let (a0, a1) = random_unit_state(rng);
            BathSpin::new(omega, lambda, a0, a1).expect("normalized amplitudes")
        })
        .collect();
    Bath::new(spins).expect("n >= 1")
}

/// Suite 1: the product closed form against the propagator-built factor.
fn factor_suite(seed: u64) -> SuiteReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x0f01);
    let configs = 60;
    let times = 200;
    let mut worst: f64 = 0.0;
    for _ in 0..configs {
        let n = rng.gen_range(1..=8);
        let bath = random_sigma_x_bath(&mut rng, n);
        for _ in 0..times {
            let t = rng.gen_range(0.0..30.0);
            let closed = bath.decoherence_factor(t);
            let exact = decoherence_factor_exact(&bath, t);
            worst = worst
                .max((closed - exact.re).abs())
                .max(exact.im.abs());
        }
    }
    SuiteReport::judge(
        "factor-closed-vs-propagator",
        worst,
        1e-10,
        Direction::Below,
        format!("{configs} sigma-x baths (N<=8), {times} times each"),
    )
}

/// Suite 2: factorized reduced state against the full-Hilbert partial trace.
fn reduced_density_suite(seed: u64) -> SuiteReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x0f02);
    let sizes = [1usize, 2, 4];
    let configs_per_size = 3;
    let times = 12;
    let mut worst: f64 = 0.0;
    for &n in &sizes {
        for _ in 0..configs_per_size {
            let central =
                CentralSpin::new(rng.gen_range(0.2..=2.0), rng.gen_range(0.0..=std::f64::consts::PI))
                    .expect("sampled in range");
            let bath = random_generic_bath(&mut rng, n);
            for k in 0..times {
                let t = (k as f64 + 0.5) * 0.8;
                let f = decoherence_factor_exact(&bath, t);
                let factored = reduced_density_matrix(&central, f, t).expect("|F| <= 1");
                let full = full_hilbert_reduced_density(&central, &bath, t)
                    .expect("N <= 12");
                worst = worst.max(factored.trace_distance(&full));
            }
        }
    }
    SuiteReport::judge(
        "reduced-density-vs-full-hilbert",
        worst,
        1e-8,
        Direction::Below,
        format!(
            "sizes {sizes:?}, {configs_per_size} generic-state baths each, {times} times"
        ),
    )
}

/// Suite 3: kinematic functional against direct quadrature.
fn kinematic_suite(seed: u64) -> SuiteReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x0f03);
    let spec = QuadratureSpec::default();
    let configs = 10;
    let mut worst: f64 = 0.0;
    for _ in 0..configs {
        let theta0 = rng.gen_range(0.15..=(std::f64::consts::PI - 0.15));
        let central = CentralSpin::new(1.0, theta0).expect("in range");
        let n = rng.gen_range(1..=6);
        let spins = (0..n)
            .map(|_| {
                let omega = rng.gen_range(0.5..=2.0);
                // lambda < omega keeps every single-spin factor strictly
                // positive, so the branch never meets a degeneracy.
                let lambda = rng.gen_range(0.01..=0.3) * omega;
                BathSpin::sigma_x_plus(omega, lambda).expect("positive parameters")
            })
            .collect();
        let bath = Bath::new(spins).expect("n >= 1");
        let quad = gp_exact(&central, &bath, 1, &spec).expect("converges");
        let kin = gp_kinematic(&central, &bath, 1, &spec).expect("no crossing");
        worst = worst.max((kin.phase - quad.phase).abs());
    }
    SuiteReport::judge(
        "kinematic-vs-quadrature",
        worst,
        1e-6,
        Direction::Below,
        format!("{configs} real-factor baths (N<=6, lambda/omega<=0.3)"),
    )
}

/// Suite 4: residual after the quadratic correction must fall like λ⁴.
fn residual_order_suite(_seed: u64) -> SuiteReport {
    let spec = QuadratureSpec::default();
    let central = CentralSpin::new(1.0, std::f64::consts::FRAC_PI_2).expect("in range");
    let residual = |lambda: f64| -> Result<f64> {
        let bath = Bath::homogeneous(10, 1.0, lambda)?;
        let exact = gp_exact(&central, &bath, 1, &spec)?.phase;
        Ok((exact - gp_perturbative(&central, 10, 1.0, lambda)).abs())
    };
    match (residual(0.02), residual(0.04)) {
        (Ok(small), Ok(large)) => SuiteReport::judge(
            "residual-order",
            large / small,
            8.0,
            Direction::Above,
            format!(
                "residual {large:.3e} at lambda=0.04 vs {small:.3e} at 0.02; \
                 quartic scaling predicts ratio 16"
            ),
        ),
        (a, b) => SuiteReport::judge(
            "residual-order",
            f64::NAN,
            8.0,
            Direction::Above,
            format!("quadrature failed: {a:?} {b:?}"),
        ),
    }
}

/// Suite 5: determine the sign of the quadratic correction empirically.
///
/// Exposed with an explicit candidate sign so a wrong compiled-in constant
/// is caught: the suite passes only for the sign the data actually selects.
fn sign_suite_with(seed: u64, candidate_sign: f64) -> SuiteReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x0f05);
    let spec = QuadratureSpec::default();
    let configs = 20;
    let mut margin = f64::INFINITY;
    let mut magnitudes: Vec<f64> = Vec::with_capacity(configs);
    for _ in 0..configs {
        let theta0 = rng.gen_range(0.15..=(std::f64::consts::PI - 0.15));
        let central = CentralSpin::new(1.0, theta0).expect("in range");
        let n = rng.gen_range(1..=12);
        let omega = rng.gen_range(0.5..=2.0);
        // n (lambda/omega)^2 in [0.002, 0.01]: weak enough that the
        // quadratic term dominates the deviation.
        let q = rng.gen_range(0.002..=0.01);
        let lambda = omega * (q / n as f64).sqrt();
        let bath = Bath::homogeneous(n, omega, lambda).expect("positive parameters");
        let deviation = gp_exact(&central, &bath, 1, &spec)
            .expect("converges")
            .phase
            - unitary_gp(theta0);
        margin = margin.min(candidate_sign * deviation);
        magnitudes.push(deviation.abs());
    }
    let lo = magnitudes.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = magnitudes.iter().cloned().fold(0.0f64, f64::max);
    SuiteReport::judge(
        "correction-sign",
        margin,
        0.0,
        Direction::Above,
        format!(
            "{configs}/{configs} deviations share sign {:+.0} iff pass; \
             |deviation| in [{lo:.3e}, {hi:.3e}]",
            candidate_sign
        ),
    )
}

fn sign_suite(seed: u64) -> SuiteReport {
    sign_suite_with(seed, PERTURBATIVE_CORRECTION_SIGN)
}

/// Run every suite. The report is always complete; inspect `passed` (or
/// [`all_passed`]) for the verdict.
pub fn run_all(seed: u64) -> Vec<SuiteReport> {
    vec![
        factor_suite(seed),
        reduced_density_suite(seed),
        kinematic_suite(seed),
        residual_order_suite(seed),
        sign_suite(seed),
    ]
}

pub fn all_passed(reports: &[SuiteReport]) -> bool {
    reports.iter().all(|r| r.passed)
}
