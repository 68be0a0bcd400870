//! `qftadm`: admissible state ensembles of the discrete quantum Fourier
//! transform. Subcommands construct the transform, compute its commutant,
//! verify ensembles, solve the qutrit orthonormality system, and emit a
//! one-shot reproduction report.

mod output;
mod report;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use qftadm_core::{
    check_qft_admissible, commutant_basis, ensemble::gram_deviation, qft_matrix, solve_fixed_imag,
    symmetry_report, CMatrix, Ensemble, QutritPointRecord, SolverConfig, DEFAULT_RANK_TOL,
};

#[derive(Parser)]
#[command(
    name = "qftadm",
    version,
    about = "Admissible state ensembles of the discrete quantum Fourier transform"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Print the n-dimensional transform matrix
    Matrix {
        n: usize,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Compute an orthonormal commutant basis and its symmetry structure
    Commutant {
        n: usize,
        /// Relative singular-value threshold for rank decisions
        #[arg(long, default_value_t = DEFAULT_RANK_TOL)]
        tol: f64,
    },
    /// Verify an ensemble file for admissibility and orthonormality
    Check {
        /// JSON file holding {"n": ..., "states": [[[re, im], ...], ...]}
        file: PathBuf,
        /// Largest acceptable residual or deviation
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
    },
    /// Solve the qutrit orthonormality system for the real parts, with the
    /// imaginary parts held fixed
    Solve3 {
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        y0: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        y1: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        y2: f64,
        /// Multistart seed; defaults to QFTADM_SEED or 0
        #[arg(long)]
        seed: Option<u64>,
        /// Number of multistart points
        #[arg(long, default_value_t = 64)]
        starts: usize,
        /// Acceptance bound on the sum of squared residuals
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
        /// Iteration cap per start
        #[arg(long, default_value_t = 200)]
        max_iters: usize,
    },
    /// Re-measure every headline claim and emit a report
    Report,
}

#[derive(Serialize)]
struct CommutantOut {
    n: usize,
    dim: usize,
    all_symmetric: bool,
    max_asymmetry: f64,
    witness: Option<CMatrix>,
    basis: Vec<CMatrix>,
}

#[derive(Serialize)]
struct CheckOut {
    n: usize,
    tolerance: f64,
    admissibility_residuals: Vec<f64>,
    max_admissibility_residual: f64,
    gram_deviation: f64,
    pass: bool,
}

#[derive(Serialize)]
struct Solve3Out {
    y0: f64,
    y1: f64,
    y2: f64,
    config: SolverConfig,
    converged_starts: usize,
    total_starts: usize,
    total_iterations: usize,
    solutions: Vec<QutritPointRecord>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(command: Command) -> anyhow::Result<ExitCode> {
    match command {
        Command::Matrix { n, format } => cmd_matrix(n, format),
        Command::Commutant { n, tol } => cmd_commutant(n, tol),
        Command::Check { file, tol } => cmd_check(&file, tol),
        Command::Solve3 {
            y0,
            y1,
            y2,
            seed,
            starts,
            tol,
            max_iters,
        } => cmd_solve3(y0, y1, y2, seed, starts, tol, max_iters),
        Command::Report => cmd_report(),
    }
}

fn cmd_matrix(n: usize, format: Format) -> anyhow::Result<ExitCode> {
    let u = qft_matrix(n)?;
    match format {
        Format::Json => println!("{}", output::to_json(&u)?),
        Format::Csv => println!("{}", output::matrix_csv(&u)),
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_commutant(n: usize, tol: f64) -> anyhow::Result<ExitCode> {
    let basis = commutant_basis(n, tol)?;
    let symmetry = symmetry_report(n)?;
    let out = CommutantOut {
        n,
        dim: basis.dim,
        all_symmetric: symmetry.all_symmetric,
        max_asymmetry: symmetry.max_asymmetry,
        witness: symmetry.witness,
        basis: basis.basis,
    };
    println!("{}", output::to_json(&out)?);
    Ok(ExitCode::SUCCESS)
}

fn cmd_check(file: &PathBuf, tol: f64) -> anyhow::Result<ExitCode> {
    if !(tol > 0.0 && tol.is_finite()) {
        anyhow::bail!("tolerance must be positive and finite, got {tol}");
    }
    let text = fs::read_to_string(file)
        .with_context(|| format!("reading ensemble file {}", file.display()))?;
    let ensemble: Ensemble = serde_json::from_str(&text)
        .with_context(|| format!("parsing ensemble file {}", file.display()))?;
    let residuals = check_qft_admissible(&ensemble)?;
    let max_residual = residuals.iter().copied().fold(0.0f64, f64::max);
    let gram_dev = gram_deviation(&ensemble);
    let pass = max_residual <= tol && gram_dev <= tol;
    let out = CheckOut {
        n: ensemble.n(),
        tolerance: tol,
        admissibility_residuals: residuals,
        max_admissibility_residual: max_residual,
        gram_deviation: gram_dev,
        pass,
    };
    println!("{}", output::to_json(&out)?);
    if pass {
        Ok(ExitCode::SUCCESS)
    } else {
        eprintln!(
            "verification failed: admissibility residual {max_residual:.3e}, gram deviation {gram_dev:.3e}, tolerance {tol:.3e}"
        );
        Ok(ExitCode::from(1))
    }
}

fn seed_from_env() -> anyhow::Result<u64> {
    match std::env::var("QFTADM_SEED") {
        Ok(v) => v
            .trim()
            .parse::<u64>()
            .with_context(|| format!("QFTADM_SEED must be a nonnegative integer, got {v:?}")),
        Err(std::env::VarError::NotPresent) => Ok(0),
        Err(e) => Err(e.into()),
    }
}

fn cmd_solve3(
    y0: f64,
    y1: f64,
    y2: f64,
    seed: Option<u64>,
    starts: usize,
    tol: f64,
    max_iters: usize,
) -> anyhow::Result<ExitCode> {
    let rng_seed = match seed {
        Some(s) => s,
        None => seed_from_env()?,
    };
    let cfg = SolverConfig {
        residual_tol: tol,
        max_iters,
        num_starts: starts,
        rng_seed,
        ..SolverConfig::default()
    };
    let outcome = solve_fixed_imag(y0, y1, y2, &cfg)?;
    let out = Solve3Out {
        y0,
        y1,
        y2,
        config: cfg,
        converged_starts: outcome.converged_starts,
        total_starts: outcome.total_starts,
        total_iterations: outcome.total_iterations,
        solutions: outcome.points.iter().map(|p| p.record()).collect(),
    };
    println!("{}", output::to_json(&out)?);
    if out.solutions.is_empty() {
        eprintln!(
            "no solutions: none of {} starts converged below {tol:.1e}; the slice is likely infeasible",
            cfg.num_starts
        );
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_report() -> anyhow::Result<ExitCode> {
    let entries = report::build()?;
    eprintln!("{}", report::render_table(&entries));
    println!("{}", output::to_json(&entries)?);
    let failures = entries
        .iter()
        .filter(|e| e.status == report::Status::Fail)
        .count();
    if failures == 0 {
        Ok(ExitCode::SUCCESS)
    } else {
        eprintln!("{failures} report entries failed");
        Ok(ExitCode::from(1))
    }
}
