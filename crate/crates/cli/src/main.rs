//! `optvalue`: estimate the value of an optimal treatment rule from data, or
//! run the Monte Carlo experiments comparing interval procedures.

mod commands;
mod config;
mod io;
mod svg;

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

/// Failure classes, each with a stable exit code.
#[derive(Debug)]
pub enum CliError {
    /// Bad flags, configuration or arguments (exit 1).
    Usage(String),
    /// Unreadable or invalid input records (exit 2).
    Data(String),
    /// Positivity violations and other numerical failures (exit 3).
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Data(m) => write!(f, "data error: {m}"),
            CliError::Numerical(m) => write!(f, "numerical failure: {m}"),
        }
    }
}

impl From<optvalue::Error> for CliError {
    fn from(e: optvalue::Error) -> Self {
        use optvalue::Error as E;
        fn root(e: &E) -> &E {
            match e {
                E::Learner { source, .. } => root(source),
                other => other,
            }
        }
        let msg = e.to_string();
        match root(&e) {
            E::InvalidArgument(_) | E::Schedule(_) | E::EmptyDataset => CliError::Usage(msg),
            E::InvalidObservation(_) | E::MixedCovariates { .. } | E::CovariateKind { .. } | E::IllDefinedNpmle { .. } => CliError::Data(msg),
            E::Positivity { .. } | E::Numerical(_) | E::Learner { .. } => CliError::Numerical(msg),
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "optvalue", version, about = "Online one-step estimation of the optimal treatment-rule value")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Estimate the optimal value from a `w,a,y` CSV file.
    Estimate(EstimateArgs),
    /// Run a Monte Carlo coverage experiment on a simulated process.
    Simulate(SimulateArgs),
    /// Compare online intervals with the m-out-of-n bootstrap over a grid of m.
    CompareBootstrap(CompareArgs),
    /// Recompute summary statistics from a replicates.csv dump.
    Summarize(SummarizeArgs),
}

#[derive(Args, Debug, Clone, Default)]
pub struct OutputArgs {
    /// Directory for summary.csv, the record dump and chart.svg.
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Do not write chart.svg.
    #[arg(long)]
    pub no_chart: bool,
}

#[derive(Args, Debug)]
pub struct EstimateArgs {
    /// Input file with header `w,a,y`; `-` reads stdin.
    #[arg(value_name = "INPUT")]
    pub input: PathBuf,
    /// Key = value configuration file; flags override its entries.
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Size of the initial chunk used only for fitting.
    #[arg(long)]
    pub ell: Option<usize>,
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Refit schedule: `every` observation or once per `blocks` of size about ell (default: every for npmle, blocks otherwise).
    #[arg(long, value_name = "every|blocks")]
    pub refit: Option<String>,
    /// Floor on each estimated conditional variance.
    #[arg(long)]
    pub sigma_floor: Option<f64>,
    /// `npmle` (integer strata) or `kernel` (real covariate); inferred from the data if omitted.
    #[arg(long, value_name = "npmle|kernel")]
    pub learner: Option<String>,
    /// Seed for learner randomness (default: $OPTVALUE_SEED, else 0).
    #[arg(long)]
    pub seed: Option<u64>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Data-generating process: d-e, c-ne or c-e.
    #[arg(long)]
    pub dgp: Option<String>,
    /// Sample size per replicate (default 1000).
    #[arg(long)]
    pub n: Option<usize>,
    /// Initial chunk size (default 100 for d-e; 25 for continuous processes when n <= 1000, else 100).
    #[arg(long)]
    pub ell: Option<usize>,
    /// Monte Carlo replicates (default 2000).
    #[arg(long)]
    pub reps: Option<usize>,
    /// Comma-separated: online, classical, bootstrap (every m of --m-grid) or bootstrap-m<M>.
    #[arg(long)]
    pub methods: Option<String>,
    /// Nuisance mode: npmle, oracle-q-kernel-rule, kernel or oracle.
    #[arg(long)]
    pub mode: Option<String>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Comma-separated resample sizes (default 0.1n, 0.2n, ..., n).
    #[arg(long)]
    pub m_grid: Option<String>,
    /// Bootstrap resamples per interval (default 500).
    #[arg(long)]
    pub draws: Option<usize>,
    /// Refit schedule: `every` observation or once per `blocks` of size about ell (default: every for npmle, blocks otherwise).
    #[arg(long, value_name = "every|blocks")]
    pub refit: Option<String>,
    #[arg(long)]
    pub sigma_floor: Option<f64>,
    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long)]
    pub threads: Option<usize>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct CompareArgs {
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub dgp: Option<String>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub ell: Option<usize>,
    /// Monte Carlo replicates (default 500).
    #[arg(long)]
    pub reps: Option<usize>,
    /// Comma-separated resample sizes (default 0.1n, 0.2n, ..., n).
    #[arg(long)]
    pub m_grid: Option<String>,
    #[arg(long)]
    pub draws: Option<usize>,
    #[arg(long)]
    pub mode: Option<String>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Refit schedule: `every` observation or once per `blocks` of size about ell (default: every for npmle, blocks otherwise).
    #[arg(long, value_name = "every|blocks")]
    pub refit: Option<String>,
    #[arg(long)]
    pub sigma_floor: Option<f64>,
    #[arg(long)]
    pub threads: Option<usize>,
    /// Coverage an m must reach to be eligible as the narrowest valid m
    /// (default 1 - alpha - 0.02).
    #[arg(long)]
    pub min_coverage: Option<f64>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct SummarizeArgs {
    /// A replicates.csv written by `simulate` or `compare-bootstrap`.
    #[arg(value_name = "REPLICATES")]
    pub replicates: PathBuf,
    #[command(flatten)]
    pub output: OutputArgs,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = match cli.command {
        Command::Estimate(a) => commands::estimate(a),
        Command::Simulate(a) => commands::simulate(a),
        Command::CompareBootstrap(a) => commands::compare_bootstrap(a),
        Command::Summarize(a) => commands::summarize(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("optvalue: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
