//! `well-echo`: profiles, structure detection and sum-rule verification for
//! a particle released by a sudden expansion of its well.
//!
//! Exit codes: 0 all checks pass, 1 a numeric check failed (or a runtime
//! error), 2 usage error.

mod commands;
mod output;

use clap::{Args, Parser, Subcommand, ValueEnum};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "well-echo", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Svg,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SmoothingArg {
    None,
    Sigma,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Detector {
    Plateaux,
    Cusps,
    Fragments,
}

/// Options shared by the computing subcommands.
#[derive(Args)]
pub struct CommonOpts {
    /// Expansion factor λ > 1
    #[arg(long)]
    lambda: f64,
    /// Grid resolution (number of uniform intervals over [0, λ])
    #[arg(long, default_value_t = 800)]
    grid: usize,
    /// Certified sup-norm bound on the truncated series tail
    #[arg(long, default_value_t = 1e-4)]
    epsilon: f64,
    /// Output format
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Output path ("-" = stdout)
    #[arg(long, default_value = "-")]
    out: String,
}

#[derive(Args)]
pub struct TimeOpts {
    /// Time as an exact fraction p/q of the period
    #[arg(long, value_parser = parse_fraction, conflicts_with = "time_real")]
    time: Option<(u64, u64)>,
    /// Time as a real fraction of the period (lower-accuracy phase path)
    #[arg(long)]
    time_real: Option<f64>,
}

fn parse_fraction(s: &str) -> Result<(u64, u64), String> {
    let (p, q) = s
        .split_once('/')
        .ok_or_else(|| format!("expected p/q, got {s}"))?;
    let p = p.trim().parse().map_err(|e| format!("bad numerator: {e}"))?;
    let q = q.trim().parse().map_err(|e| format!("bad denominator: {e}"))?;
    if q == 0 {
        return Err("denominator must be positive".into());
    }
    Ok((p, q))
}

#[derive(Subcommand)]
enum Command {
    /// Density and current profile at one time, with optional detectors
    Snapshot {
        #[command(flatten)]
        common: CommonOpts,
        #[command(flatten)]
        time: TimeOpts,
        /// Detectors to run, e.g. --detect plateaux,cusps
        #[arg(long, value_enum, value_delimiter = ',')]
        detect: Vec<Detector>,
        /// Gibbs damping of the current's derivative series
        #[arg(long, value_enum, default_value_t = SmoothingArg::None)]
        smoothing: SmoothingArg,
    },
    /// Density and current at a fixed position as functions of time,
    /// with the time-reflected (τ ↦ 1−τ) columns alongside
    Timetrace {
        #[command(flatten)]
        common: CommonOpts,
        /// Position ξ at which to trace
        #[arg(long, default_value_t = 0.5)]
        xi: f64,
        /// Number of time samples over one period
        #[arg(long, default_value_t = 400)]
        time_steps: u64,
    },
    /// Run the sum-rule, oracle and symmetry checks; nonzero exit on failure
    Verify {
        /// λ values to check (defaults to 1.5, 2.5, 3, 5.5, 8)
        #[arg(long, value_delimiter = ',')]
        lambda: Vec<f64>,
        /// Truncation bound for the oracle comparisons
        #[arg(long, default_value_t = 1e-4)]
        epsilon: f64,
        /// Report path ("-" = stdout)
        #[arg(long, default_value = "-")]
        out: String,
    },
    /// Sweep fragment/peak counts over λ and τ = p/M
    Scan {
        /// λ values to scan
        #[arg(long, value_delimiter = ',', required = true)]
        lambda: Vec<f64>,
        /// Period divisor M (τ = p/M)
        #[arg(long, default_value_t = 12)]
        period_divisor: u64,
        /// Numerators p to scan (default 1..=M)
        #[arg(long, value_delimiter = ',')]
        numerators: Vec<u64>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long, default_value = "-")]
        out: String,
    },
}

fn main() -> ExitCode {
    if let Ok(threads) = std::env::var("WELL_ECHO_THREADS") {
        if let Ok(n) = threads.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build_global();
        }
    }
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Snapshot {
            common,
            time,
            detect,
            smoothing,
        } => commands::snapshot(&common, &time, &detect, smoothing),
        Command::Timetrace {
            common,
            xi,
            time_steps,
        } => commands::timetrace(&common, xi, time_steps),
        Command::Verify {
            lambda,
            epsilon,
            out,
        } => commands::verify(&lambda, epsilon, &out),
        Command::Scan {
            lambda,
            period_divisor,
            numerators,
            format,
            out,
        } => commands::scan(&lambda, period_divisor, &numerators, format, &out),
    };
    match outcome {
        Ok(commands::Outcome::Ok) => ExitCode::SUCCESS,
        Ok(commands::Outcome::CheckFailed) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<commands::UsageError>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
