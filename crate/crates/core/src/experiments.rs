//! Parameter-sweep drivers behind the standard figures.
//!
//! Each driver walks a grid of (θ₀, λ, N) cells, evaluates the exact and
//! perturbative phases per cell, and collects rows into a deterministic
//! table: cells are independent and evaluated on a local worker pool, then
//! sorted by (N, θ₀, λ, cycles) before emission. CSV output uses fixed
//! 17-significant-digit scientific formatting so repeat runs are
//! byte-identical; a gnuplot script referencing only the CSV is written
//! next to each table.

use rayon::prelude::*;
use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::model::{Bath, CentralSpin};
use crate::phase::{gp_exact, gp_perturbative, unitary_gp, GpResult, QuadratureSpec};

/// Axes of a sweep: which (θ₀, λ, N) cells to evaluate.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepGrid {
    pub theta0_values: Vec<f64>,
    pub lambda_values: Vec<f64>,
    pub n_values: Vec<usize>,
    /// Bath self-frequency in units of the central frequency.
    pub omega_ratio: f64,
    pub cycles: usize,
}

impl SweepGrid {
    fn validate(&self) -> Result<()> {
        if self.theta0_values.is_empty()
            || self.lambda_values.is_empty()
            || self.n_values.is_empty()
        {
            return Err(Error::Config(
                "sweep grid axes must all be non-empty".into(),
            ));
        }
        if !self.omega_ratio.is_finite() || self.omega_ratio <= 0.0 {
            return Err(Error::InvalidParam {
                name: "omega_ratio",
                value: self.omega_ratio,
                reason: "bath frequency ratio must be positive",
            });
        }
        if self.cycles == 0 {
            return Err(Error::InvalidParam {
                name: "cycles",
                value: 0.0,
                reason: "sweeps need at least one cycle",
            });
        }
        Ok(())
    }
}

/// Uniform grid of `count` points from `a` to `b` inclusive.
pub fn linspace(a: f64, b: f64, count: usize) -> Vec<f64> {
    assert!(count >= 2, "linspace needs at least two points");
    (0..count)
        .map(|i| a + (b - a) * i as f64 / (count - 1) as f64)
        .collect()
}

/// One evaluated cell. All derived columns are recomputed at construction;
/// the unitary column is asserted against its definition at write time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRecord {
    pub theta0: f64,
    pub lambda: f64,
    pub n: usize,
    pub cycles: usize,
    pub gp_exact: f64,
    pub gp_perturbative: f64,
    pub gp_unitary: f64,
    pub deviation_exact: f64,
    pub deviation_pert: f64,
    pub quadrature_error: f64,
    /// True where exact and perturbative phases disagree by more than 5%
    /// relative to the exact value.
    pub pert_disagrees: bool,
}

impl SweepRecord {
    fn new(
        theta0: f64,
        lambda: f64,
        n: usize,
        cycles: usize,
        exact: &GpResult,
        perturbative: f64,
    ) -> Self {
        let gp_unitary = unitary_gp(theta0);
        assert!(
            (gp_unitary - std::f64::consts::PI * (1.0 + theta0.cos())).abs() <= 1e-12,
            "unitary column drifted from its definition"
        );
        let deviation_exact = exact.phase - gp_unitary;
        let deviation_pert = perturbative - gp_unitary;
        let gap = (exact.phase - perturbative).abs();
        let pert_disagrees = gap > 0.05 * exact.phase.abs().max(1e-12);
        SweepRecord {
            theta0,
            lambda,
            n,
            cycles,
            gp_exact: exact.phase,
            gp_perturbative: perturbative,
            gp_unitary,
            deviation_exact,
            deviation_pert,
            quadrature_error: exact.estimated_error,
            pert_disagrees,
        }
    }
}

/// A cell whose quadrature failed; sweeps record these instead of aborting.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepFailure {
    pub theta0: f64,
    pub lambda: f64,
    pub n: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SweepTable {
    pub records: Vec<SweepRecord>,
    pub failures: Vec<SweepFailure>,
}

fn build_worker_pool(workers: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::Config(format!("worker pool: {e}")))
}

/// Grid engine shared by the figure drivers: evaluates every
/// (N, θ₀, λ) cell concurrently and returns deterministically ordered rows.
pub fn run_sweep(
    central_omega: f64,
    grid: &SweepGrid,
    spec: &QuadratureSpec,
    workers: usize,
) -> Result<SweepTable> {
    grid.validate()?;
    spec.validate()?;

    let mut cells = Vec::new();
    for &n in &grid.n_values {
        for &theta0 in &grid.theta0_values {
            for &lambda in &grid.lambda_values {
                cells.push((n, theta0, lambda));
            }
        }
    }

    let bath_omega = grid.omega_ratio * central_omega;
    let pool = build_worker_pool(workers)?;
    let outcomes: Vec<std::result::Result<SweepRecord, SweepFailure>> = pool.install(|| {
        cells
            .par_iter()
            .map(|&(n, theta0, lambda)| {
                let cell_failure = |message: String| SweepFailure {
                    theta0,
                    lambda,
                    n,
                    message,
                };
                let central = CentralSpin::new(central_omega, theta0)
                    .map_err(|e| cell_failure(e.to_string()))?;
                let bath = Bath::homogeneous(n, bath_omega, lambda)
                    .map_err(|e| cell_failure(e.to_string()))?;
                let exact = gp_exact(&central, &bath, grid.cycles, spec)
                    .map_err(|e| cell_failure(e.to_string()))?;
                let pert = gp_perturbative(&central, n, bath_omega, lambda);
                Ok(SweepRecord::new(
                    theta0,
                    lambda,
                    n,
                    grid.cycles,
                    &exact,
                    pert,
                ))
            })
            .collect()
    });

    let mut table = SweepTable::default();
    for outcome in outcomes {
        match outcome {
            Ok(r) => table.records.push(r),
            Err(f) => table.failures.push(f),
        }
    }
    let key = |r: &SweepRecord| (r.n, r.theta0, r.lambda, r.cycles);
    table.records.sort_by(|a, b| {
        let (na, ta, la, ca) = key(a);
        let (nb, tb, lb, cb) = key(b);
        na.cmp(&nb)
            .then(ta.total_cmp(&tb))
            .then(la.total_cmp(&lb))
            .then(ca.cmp(&cb))
    });
    table.failures.sort_by(|a, b| {
        a.n.cmp(&b.n)
            .then(a.theta0.total_cmp(&b.theta0))
            .then(a.lambda.total_cmp(&b.lambda))
    });
    Ok(table)
}

/// Exact one-cycle phase over the (θ₀, λ) plane at fixed bath size.
pub fn figure1_surface(
    central_omega: f64,
    grid: &SweepGrid,
    spec: &QuadratureSpec,
    workers: usize,
) -> Result<SweepTable> {
    run_sweep(central_omega, grid, spec, workers)
}

/// Exact vs perturbative phase across couplings, with the 5% disagreement
/// flag marking where the quadratic formula stops being trustworthy.
pub fn exact_vs_perturbative(
    central_omega: f64,
    grid: &SweepGrid,
    spec: &QuadratureSpec,
    workers: usize,
) -> Result<SweepTable> {
    run_sweep(central_omega, grid, spec, workers)
}

/// Deviation of both phase estimates from the unitary value as a function
/// of the initial angle.
pub fn deviation_vs_theta0(
    central_omega: f64,
    grid: &SweepGrid,
    spec: &QuadratureSpec,
    workers: usize,
) -> Result<SweepTable> {
    run_sweep(central_omega, grid, spec, workers)
}

/// One winding-number data point: accumulated phase over m cycles and its
/// ratio to the single-cycle phase.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindingPoint {
    pub m: usize,
    pub phase: f64,
    pub ratio: f64,
    pub quadrature_error: f64,
}

/// Accumulated phase over 1..=m_max cycles, normalized to one cycle.
pub fn winding_ratio(
    central: &CentralSpin,
    bath: &Bath,
    m_max: usize,
    spec: &QuadratureSpec,
) -> Result<Vec<WindingPoint>> {
    if m_max < 2 {
        return Err(Error::InvalidParam {
            name: "m_max",
            value: m_max as f64,
            reason: "a winding study needs at least two cycles",
        });
    }
    let base = gp_exact(central, bath, 1, spec)?;
    let mut points = vec![WindingPoint {
        m: 1,
        phase: base.phase,
        ratio: 1.0,
        quadrature_error: base.estimated_error,
    }];
    for m in 2..=m_max {
        let gp = gp_exact(central, bath, m, spec)?;
        points.push(WindingPoint {
            m,
            phase: gp.phase,
            ratio: gp.phase / base.phase,
            quadrature_error: gp.estimated_error,
        });
    }
    Ok(points)
}

/// A labeled winding curve: bath parameters plus the ratio trace.
#[derive(Debug, Clone, PartialEq)]
pub struct WindingCase {
    pub label: &'static str,
    pub omega: f64,
    pub lambda: f64,
    pub points: Vec<WindingPoint>,
}

/// The standard winding study: two commensurate baths (dressed frequency
/// exactly Ω, so F repeats every half cycle and the ratio is exactly the
/// winding number) whose effective couplings differ fourfold, plus one
/// incommensurate bath for contrast.
pub fn default_winding_study(
    central: &CentralSpin,
    n: usize,
    m_max: usize,
    spec: &QuadratureSpec,
) -> Result<Vec<WindingCase>> {
    let scale = central.omega;
    // Commensurate: solve omega^2 + lambda^2 = Omega^2 at lambda/omega
    // fixed. q is (lambda/omega)^2; quadrupling the effective coupling
    // multiplies q by 16.
    let q0 = (0.1f64 / (1.0f64 - 0.01).sqrt()).powi(2);
    let commensurate = |q: f64| {
        let omega = scale / (1.0 + q).sqrt();
        (omega, omega * q.sqrt())
    };
    let (om_a, la_a) = commensurate(q0);
    let (om_b, la_b) = commensurate(16.0 * q0);
    let cases = [
        ("commensurate", om_a, la_a),
        ("commensurate-4x-coupling", om_b, la_b),
        ("incommensurate", scale, 0.1 * scale),
    ];
    cases
        .into_iter()
        .map(|(label, omega, lambda)| {
            let bath = Bath::homogeneous(n, omega, lambda)?;
            Ok(WindingCase {
                label,
                omega,
                lambda,
                points: winding_ratio(central, &bath, m_max, spec)?,
            })
        })
        .collect()
}

/// One bath size in the dispersion study.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DispersionPoint {
    pub n: usize,
    pub mean: f64,
    pub dispersion: f64,
}

/// Least-squares line through (x, y) with its residual sum of squares.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayFit {
    pub slope: f64,
    pub intercept: f64,
    pub residual_sum_sq: f64,
}

fn least_squares(xs: &[f64], ys: &[f64]) -> DecayFit {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual_sum_sq = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| {
            let r = y - (slope * x + intercept);
            r * r
        })
        .sum();
    DecayFit {
        slope,
        intercept,
        residual_sum_sq,
    }
}

/// Empirical F statistics versus bath size with decay-law diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct DispersionStudy {
    pub points: Vec<DispersionPoint>,
    /// log(dispersion) against log(N): a power law is a straight line.
    pub power_law_fit: Option<DecayFit>,
    /// log(dispersion) against N: exponential decay is a straight line.
    pub exponential_fit: Option<DecayFit>,
}

/// Time-averaged mean and dispersion of F for each bath size, with both
/// decay fits emitted as diagnostics. No decay exponent is asserted; the
/// fits exist so the table documents which law the data actually follows.
pub fn dispersion_vs_n(
    n_values: &[usize],
    omega: f64,
    lambda: f64,
    horizon: f64,
    samples: usize,
) -> Result<DispersionStudy> {
    if n_values.is_empty() {
        return Err(Error::Config("dispersion study needs bath sizes".into()));
    }
    let mut points = Vec::with_capacity(n_values.len());
    let mut sizes = n_values.to_vec();
    sizes.sort_unstable();
    for &n in &sizes {
        let bath = Bath::homogeneous(n, omega, lambda)?;
        let (mean, dispersion) = bath.mean_time_averaged_factor(horizon, samples)?;
        points.push(DispersionPoint {
            n,
            mean,
            dispersion,
        });
    }
    let positive: Vec<&DispersionPoint> =
        points.iter().filter(|p| p.dispersion > 0.0).collect();
    let (power_law_fit, exponential_fit) = if positive.len() >= 2 {
        let logs: Vec<f64> = positive.iter().map(|p| p.dispersion.ln()).collect();
        let log_n: Vec<f64> = positive.iter().map(|p| (p.n as f64).ln()).collect();
        let lin_n: Vec<f64> = positive.iter().map(|p| p.n as f64).collect();
        (
            Some(least_squares(&log_n, &logs)),
            Some(least_squares(&lin_n, &logs)),
        )
    } else {
        (None, None)
    };
    Ok(DispersionStudy {
        points,
        power_law_fit,
        exponential_fit,
    })
}

// ---------------------------------------------------------------------------
// Emission: CSV tables and companion gnuplot scripts.

/// 17 significant digits: round-trips f64 exactly and keeps tables diffable.
fn fmt(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_sweep_csv(table: &SweepTable, path: &Path) -> Result<()> {
    let mut out = String::from(
        "theta0,lambda,n,cycles,gp_exact,gp_perturbative,gp_unitary,\
         deviation_exact,deviation_pert,quadrature_error,pert_disagrees\n",
    );
    for r in &table.records {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{}",
            fmt(r.theta0),
            fmt(r.lambda),
            r.n,
            r.cycles,
            fmt(r.gp_exact),
            fmt(r.gp_perturbative),
            fmt(r.gp_unitary),
            fmt(r.deviation_exact),
            fmt(r.deviation_pert),
            fmt(r.quadrature_error),
            u8::from(r.pert_disagrees),
        );
    }
    std::fs::write(path, out)?;
    Ok(())
}

pub fn write_winding_csv(cases: &[WindingCase], path: &Path) -> Result<()> {
    let mut out = String::from("case,omega,lambda,m,gp_exact,ratio,quadrature_error\n");
    for case in cases {
        for p in &case.points {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{}",
                case.label,
                fmt(case.omega),
                fmt(case.lambda),
                p.m,
                fmt(p.phase),
                fmt(p.ratio),
                fmt(p.quadrature_error),
            );
        }
    }
    std::fs::write(path, out)?;
    Ok(())
}

pub fn write_dispersion_csv(study: &DispersionStudy, path: &Path) -> Result<()> {
    let mut out = String::from("n,mean,dispersion\n");
    for p in &study.points {
        let _ = writeln!(out, "{},{},{}", p.n, fmt(p.mean), fmt(p.dispersion));
    }
    std::fs::write(path, out)?;
    Ok(())
}

fn script_header(csv_name: &str) -> String {
    format!(
        "# gnuplot script, reads only {csv_name}\n\
         set datafile separator \",\"\n\
         set key outside\n\
         set grid\n"
    )
}

/// Gnuplot filter selecting rows where column `col` is (numerically) `v`.
fn col_filter(col: usize, v: f64, take: usize) -> String {
    format!("(abs(${col}-({v:.17}))<1e-12?${take}:NaN)")
}

pub fn write_fig1_script(csv_name: &str, path: &Path) -> Result<()> {
    let mut s = script_header(csv_name);
    let _ = write!(
        s,
        "set xlabel \"coupling lambda\"\n\
         set ylabel \"initial angle theta0\"\n\
         set zlabel \"geometric phase\" rotate parallel\n\
         set hidden3d\n\
         set dgrid3d 41,51\n\
         splot \"{csv_name}\" every ::1 using 2:1:5 with lines title \"exact phase\"\n"
    );
    std::fs::write(path, s)?;
    Ok(())
}

pub fn write_phase_vs_lambda_script(
    csv_name: &str,
    theta0_values: &[f64],
    path: &Path,
) -> Result<()> {
    let mut s = script_header(csv_name);
    let _ = write!(
        s,
        "set xlabel \"coupling lambda\"\nset ylabel \"geometric phase\"\nplot \\\n"
    );
    let mut lines = Vec::new();
    for &theta0 in theta0_values {
        lines.push(format!(
            "  \"{csv_name}\" every ::1 using {}:5 with lines title \"exact, theta0={theta0:.3}\"",
            col_filter(1, theta0, 2)
        ));
        lines.push(format!(
            "  \"{csv_name}\" every ::1 using {}:6 with points pt 6 title \"quadratic, theta0={theta0:.3}\"",
            col_filter(1, theta0, 2)
        ));
    }
    let _ = writeln!(s, "{}", lines.join(", \\\n"));
    std::fs::write(path, s)?;
    Ok(())
}

pub fn write_deviation_script(
    csv_name: &str,
    n_values: &[usize],
    path: &Path,
) -> Result<()> {
    let mut s = script_header(csv_name);
    let _ = write!(
        s,
        "set xlabel \"initial angle theta0\"\nset ylabel \"deviation from unitary phase\"\nplot \\\n"
    );
    let mut lines = Vec::new();
    for &n in n_values {
        lines.push(format!(
            "  \"{csv_name}\" every ::1 using ($3=={n}?$1:NaN):8 with lines title \"exact, N={n}\""
        ));
        lines.push(format!(
            "  \"{csv_name}\" every ::1 using ($3=={n}?$1:NaN):9 with points pt 6 title \"quadratic, N={n}\""
        ));
    }
    let _ = writeln!(s, "{}", lines.join(", \\\n"));
    std::fs::write(path, s)?;
    Ok(())
}

pub fn write_winding_script(
    csv_name: &str,
    cases: &[WindingCase],
    path: &Path,
) -> Result<()> {
    let mut s = script_header(csv_name);
    let _ = write!(
        s,
        "set xlabel \"winding number m\"\nset ylabel \"phase(m) / phase(1)\"\nplot \\\n"
    );
    let mut lines = vec!["  x with lines dashtype 2 title \"exact m-fold scaling\"".to_string()];
    for case in cases {
        lines.push(format!(
            "  \"{csv_name}\" every ::1 using (strcol(1) eq \"{}\"?$4:NaN):6 with linespoints title \"{}\"",
            case.label, case.label
        ));
    }
    let _ = writeln!(s, "{}", lines.join(", \\\n"));
    std::fs::write(path, s)?;
    Ok(())
}

pub fn write_dispersion_script(
    csv_name: &str,
    study: &DispersionStudy,
    path: &Path,
) -> Result<()> {
    let mut s = script_header(csv_name);
    if let (Some(p), Some(e)) = (&study.power_law_fit, &study.exponential_fit) {
        let _ = writeln!(
            s,
            "# power-law fit:   log(d) = {:+.6} * log(N) {:+.6}  (rss {:.3e})\n\
             # exponential fit: log(d) = {:+.6} * N {:+.6}  (rss {:.3e})",
            p.slope, p.intercept, p.residual_sum_sq, e.slope, e.intercept, e.residual_sum_sq
        );
    }
    let _ = write!(
        s,
        "set logscale xy\n\
         set xlabel \"bath size N\"\n\
         set ylabel \"dispersion of F\"\n\
         plot \"{csv_name}\" every ::1 using 1:3 with linespoints title \"measured dispersion\"\n"
    );
    std::fs::write(path, s)?;
    Ok(())
}
