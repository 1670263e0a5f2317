//! Experiment runner: configures problem + contour + method from a JSON
//! file, executes, and emits machine-readable results (JSON report, CSV
//! eigenvalue tables, halo plot data).

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

pub use config::Config;

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Io(String),
    /// Two runs that cannot be compared (different problem or contour).
    IncompatibleRuns(String),
    Core(ratnlevp::Error),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "configuration error: {msg}"),
            CliError::Io(msg) => write!(f, "io error: {msg}"),
            CliError::IncompatibleRuns(msg) => write!(f, "incompatible runs: {msg}"),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

impl From<ratnlevp::Error> for CliError {
    fn from(e: ratnlevp::Error) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(ratnlevp::Error::ConvergenceFailure { .. }) => 2,
            _ => 1,
        }
    }
}

#[derive(Parser)]
#[command(
    name = "ratnlevp",
    about = "Nonlinear eigenvalue solver driver: rational approximation on a contour, \
             implicit linearization, shift-and-invert solvers, and a contour-integral baseline",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sweep the rational approximation error over a node-count range.
    ApproxError {
        #[arg(long)]
        config: PathBuf,
        /// Output directory override.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve the configured problem and write the eigenvalue report.
    Solve {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Seed override for the random starts.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Emit halo-classification plot data (surrogate spectrum, references,
    /// linear-pencil spectrum, contour samples).
    Halo {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Compare the interior eigenvalues of two runs on the same problem.
    Compare {
        /// First run configuration.
        config_a: PathBuf,
        /// Second run configuration.
        config_b: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// List built-in gallery problems and their standard experiments.
    GalleryList,
}

fn main() -> ExitCode {
    // RATNLEVP_THREADS caps internal parallelism (grid sweeps etc).
    if let Some(threads) = std::env::var("RATNLEVP_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
    {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads.max(1))
            .build_global();
    }
    let cli = Cli::parse();
    let result = match cli.command {
        Command::ApproxError { config, out } => commands::approx_error(&config, out.as_deref()),
        Command::Solve { config, out, seed } => commands::solve_cmd(&config, out.as_deref(), seed),
        Command::Halo { config, out, seed } => commands::halo(&config, out.as_deref(), seed),
        Command::Compare {
            config_a,
            config_b,
            out,
            seed,
        } => commands::compare(&config_a, &config_b, out.as_deref(), seed),
        Command::GalleryList => commands::gallery_list(),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
