//! Command-line front end: single evaluations, oracle validation, and the
//! standard figure sweeps.
//!
//! Output discipline: stdout carries only deterministic, machine-parseable
//! results (key=value lines, suite reports, row counts); wall-clock timing
//! goes to stderr so identical invocations produce byte-identical stdout.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand};

use spinbath::config::{default_config, load_config, ModelConfig};
use spinbath::error::{Error, Result};
use spinbath::experiments::{
    default_winding_study, deviation_vs_theta0, dispersion_vs_n, exact_vs_perturbative,
    figure1_surface, linspace, write_deviation_script, write_dispersion_csv,
    write_dispersion_script, write_fig1_script, write_phase_vs_lambda_script,
    write_sweep_csv, write_winding_csv, write_winding_script, SweepGrid,
};
use spinbath::oracle::decoherence_factor_exact;
use spinbath::phase::{gp_exact, gp_kinematic, gp_perturbative, unitary_gp, QuadratureSpec};
use spinbath::validate;

#[derive(Parser)]
#[command(
    name = "spinbath",
    version,
    about = "Decoherence factor and geometric phase of a central spin \
             dephased by an independent-spin bath"
)]
struct Cli {
    /// Model configuration file (TOML). Built-in defaults when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Directory for CSV tables and plot scripts.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,

    /// Quadrature refinement tolerance.
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol: f64,

    /// Worker threads for sweeps. Defaults to the available cores.
    #[arg(long, global = true)]
    workers: Option<usize>,

    /// Seed for the randomized validation baths.
    #[arg(long, global = true, default_value_t = 7)]
    seed: u64,

    /// Quasi-cycles for phase evaluation.
    #[arg(long, global = true, default_value_t = 1)]
    cycles: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Tabulate F(t): closed product form next to the propagator value.
    Decoherence {
        /// Last time in the table.
        #[arg(long, default_value_t = 30.0)]
        t_max: f64,
        /// Number of rows (uniform grid from 0 to t_max inclusive).
        #[arg(long, default_value_t = 600)]
        steps: usize,
    },
    /// Print every phase estimate for the configured model on one line.
    Gp,
    /// Regenerate a figure table plus its gnuplot script.
    ///
    /// Experiments: fig1 (phase surface), fig2/fig3 (exact vs quadratic,
    /// N=10/N=100), fig4 (deviation vs angle), fig5 (winding ratios),
    /// dispersion (time-averaged F vs bath size).
    Sweep { experiment: String },
    /// Run the five self-check suites against the brute-force oracle.
    Validate,
}

fn main() {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(e.exit_code());
        }
    }
}

fn run(cli: &Cli) -> Result<i32> {
    if !cli.tol.is_finite() || cli.tol <= 0.0 {
        return Err(Error::InvalidParam {
            name: "tol",
            value: cli.tol,
            reason: "quadrature tolerance must be positive and finite",
        });
    }
    if cli.workers == Some(0) {
        return Err(Error::InvalidParam {
            name: "workers",
            value: 0.0,
            reason: "worker count must be at least 1",
        });
    }
    let model = match &cli.config {
        Some(path) => load_config(path)?,
        None => default_config(),
    };
    let spec = QuadratureSpec {
        tolerance: cli.tol,
        ..QuadratureSpec::default()
    };

    match &cli.command {
        Command::Decoherence { t_max, steps } => {
            cmd_decoherence(&model, *t_max, *steps, &cli.out)
        }
        Command::Gp => cmd_gp(&model, cli.cycles, &spec),
        Command::Sweep { experiment } => {
            let workers = cli.workers.unwrap_or_else(|| {
                std::thread::available_parallelism()
                    .map(std::num::NonZeroUsize::get)
                    .unwrap_or(1)
            });
            cmd_sweep(&model, experiment, &spec, workers, &cli.out)
        }
        Command::Validate => cmd_validate(cli.seed),
    }
}

fn fmt(v: f64) -> String {
    format!("{v:.16e}")
}

fn cmd_decoherence(model: &ModelConfig, t_max: f64, steps: usize, out: &Path) -> Result<i32> {
    if !t_max.is_finite() || t_max <= 0.0 {
        return Err(Error::InvalidParam {
            name: "t_max",
            value: t_max,
            reason: "time horizon must be positive and finite",
        });
    }
    if steps < 2 {
        return Err(Error::InvalidParam {
            name: "steps",
            value: steps as f64,
            reason: "the table needs at least two rows",
        });
    }

    let mut csv = String::from("t,f_closed,f_exact_re,f_exact_im\n");
    let mut max_gap: f64 = 0.0;
    for j in 0..steps {
        let t = t_max * j as f64 / (steps - 1) as f64;
        let closed = model.bath.decoherence_factor(t);
        let exact = decoherence_factor_exact(&model.bath, t);
        max_gap = max_gap.max((closed - exact.re).hypot(exact.im));
        use std::fmt::Write as _;
        let _ = writeln!(
            csv,
            "{},{},{},{}",
            fmt(t),
            fmt(closed),
            fmt(exact.re),
            fmt(exact.im)
        );
    }

    std::fs::create_dir_all(out)?;
    let path = out.join("decoherence.csv");
    std::fs::write(&path, csv)?;
    println!(
        "rows={steps} max_factor_gap={} csv={}",
        fmt(max_gap),
        path.display()
    );
    Ok(0)
}

fn cmd_gp(model: &ModelConfig, cycles: usize, spec: &QuadratureSpec) -> Result<i32> {
    let central = &model.central;
    let bath = &model.bath;

    let exact = gp_exact(central, bath, cycles, spec)?;
    let kinematic = gp_kinematic(central, bath, cycles, spec)?;
    let unitary = cycles as f64 * unitary_gp(central.theta0);
    // The quadratic formula is stated per cycle; leave it out (NaN) for
    // multi-cycle runs and for baths without homogeneous parameters.
    let pert = if cycles == 1 {
        bath.homogeneous_parameters()
            .map(|(n, omega, lambda)| gp_perturbative(central, n, omega, lambda))
            .unwrap_or(f64::NAN)
    } else {
        f64::NAN
    };

    let deviation_exact = exact.phase - unitary;
    let deviation_pert = pert - unitary;
    let pert_within_1pct = (exact.phase - pert).abs() < 0.01 * deviation_exact.abs();

    println!(
        "cycles={cycles} gp_exact={} gp_kinematic={} gp_perturbative={} gp_unitary={} \
         deviation_exact={} deviation_pert={} quadrature_error={} pert_within_1pct={}",
        fmt(exact.phase),
        fmt(kinematic.phase),
        fmt(pert),
        fmt(unitary),
        fmt(deviation_exact),
        fmt(deviation_pert),
        fmt(exact.estimated_error.max(kinematic.estimated_error)),
        pert_within_1pct
    );
    Ok(0)
}

const EXPERIMENTS: [&str; 6] = ["fig1", "fig2", "fig3", "fig4", "fig5", "dispersion"];

fn four_angles() -> Vec<f64> {
    vec![0.1 * PI, 0.25 * PI, 0.5 * PI, 0.75 * PI]
}

fn cmd_sweep(
    model: &ModelConfig,
    experiment: &str,
    spec: &QuadratureSpec,
    workers: usize,
    out: &Path,
) -> Result<i32> {
    if !EXPERIMENTS.contains(&experiment) {
        return Err(Error::Config(format!(
            "unknown experiment {experiment:?}; valid: {}",
            EXPERIMENTS.join(", ")
        )));
    }
    std::fs::create_dir_all(out)?;
    let omega = model.central.omega;
    let csv_path = out.join(format!("{experiment}.csv"));
    let script_path = out.join(format!("{experiment}.gp"));
    let csv_name = format!("{experiment}.csv");
    let started = Instant::now();

    let (rows, failures) = match experiment {
        "fig1" => {
            let grid = SweepGrid {
                theta0_values: linspace(0.0, PI, 41),
                lambda_values: linspace(0.0, 0.2, 51),
                n_values: vec![10],
                omega_ratio: 1.0,
                cycles: 1,
            };
            let table = figure1_surface(omega, &grid, spec, workers)?;
            write_sweep_csv(&table, &csv_path)?;
            write_fig1_script(&csv_name, &script_path)?;
            (table.records.len(), table.failures.len())
        }
        "fig2" | "fig3" => {
            let n = if experiment == "fig2" { 10 } else { 100 };
            let grid = SweepGrid {
                theta0_values: four_angles(),
                lambda_values: linspace(0.0, 0.2, 51),
                n_values: vec![n],
                omega_ratio: 1.0,
                cycles: 1,
            };
            let table = exact_vs_perturbative(omega, &grid, spec, workers)?;
            write_sweep_csv(&table, &csv_path)?;
            write_phase_vs_lambda_script(&csv_name, &grid.theta0_values, &script_path)?;
            (table.records.len(), table.failures.len())
        }
        "fig4" => {
            // Interior angles only: the deviation vanishes identically at
            // both poles, and theta0 = 0, pi add no information.
            let theta0_values: Vec<f64> =
                linspace(0.0, PI, 41)[1..40].to_vec();
            let grid = SweepGrid {
                theta0_values,
                lambda_values: vec![0.05],
                n_values: vec![10, 100],
                omega_ratio: 1.0,
                cycles: 1,
            };
            let table = deviation_vs_theta0(omega, &grid, spec, workers)?;
            write_sweep_csv(&table, &csv_path)?;
            write_deviation_script(&csv_name, &grid.n_values, &script_path)?;
            (table.records.len(), table.failures.len())
        }
        "fig5" => {
            let cases = default_winding_study(&model.central, model.bath.len(), 10, spec)?;
            let rows: usize = cases.iter().map(|c| c.points.len()).sum();
            write_winding_csv(&cases, &csv_path)?;
            write_winding_script(&csv_name, &cases, &script_path)?;
            (rows, 0)
        }
        "dispersion" => {
            let study = dispersion_vs_n(
                &[2, 4, 8, 16, 32, 64],
                1.0,
                0.3,
                400.0 * PI,
                200_000,
            )?;
            let rows = study.points.len();
            write_dispersion_csv(&study, &csv_path)?;
            write_dispersion_script(&csv_name, &study, &script_path)?;
            (rows, 0)
        }
        _ => unreachable!("experiment name already validated"),
    };

    eprintln!("wall_time_s={:.3}", started.elapsed().as_secs_f64());
    println!(
        "experiment={experiment} rows={rows} failures={failures} csv={} script={}",
        csv_path.display(),
        script_path.display()
    );
    Ok(0)
}

fn cmd_validate(seed: u64) -> Result<i32> {
    let reports = validate::run_all(seed);
    for r in &reports {
        println!("{}", r.render());
    }
    let sign_ok = reports
        .iter()
        .find(|r| r.name == "correction-sign")
        .map(|r| r.passed)
        .unwrap_or(false);
    if sign_ok {
        println!(
            "determined_sign={:+.0}",
            spinbath::phase::PERTURBATIVE_CORRECTION_SIGN
        );
    } else {
        println!("determined_sign=inconsistent");
    }
    Ok(if validate::all_passed(&reports) { 0 } else { 1 })
}
