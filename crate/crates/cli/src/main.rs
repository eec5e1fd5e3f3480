//! Command-line front end for the grouped-importance pipeline.
//!
//! Exit codes: 0 success, 2 usage error, 3 data validation error,
//! 4 numerical failure.

mod commands;
mod experiments;
mod runfile;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use grimp_core::Error as CoreError;

#[derive(Debug)]
pub struct CliError {
    pub message: String,
    pub code: u8,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        Self {
            message: message.into(),
            code: 2,
        }
    }

    pub fn data(message: impl Into<String>) -> Self {
        Self {
            message: message.into(),
            code: 3,
        }
    }

    pub fn numerical(message: impl Into<String>) -> Self {
        Self {
            message: message.into(),
            code: 4,
        }
    }
}

impl From<CoreError> for CliError {
    fn from(err: CoreError) -> Self {
        let code = match &err {
            CoreError::InvalidConfig(_) => 2,
            CoreError::NoOobRows | CoreError::NoUsableTrees => 4,
            _ => 3,
        };
        Self {
            message: err.to_string(),
            code,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FilterArg {
    Db2,
    Db4,
}

impl FilterArg {
    pub fn to_filter(self) -> grimp_core::wavelets::WaveletFilter {
        match self {
            FilterArg::Db2 => grimp_core::wavelets::WaveletFilter::Db2,
            FilterArg::Db4 => grimp_core::wavelets::WaveletFilter::Db4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SchemeArg {
    /// One group per functional variable.
    ByVariable,
    /// One group per frequency level (plus a scaling group), all variables.
    ByLevel,
    /// Per-level groups of a single variable (requires --scheme-variable).
    LevelsOf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AlgorithmArg {
    Rfe,
    Nrfe,
}

impl AlgorithmArg {
    pub fn to_algorithm(self) -> grimp_core::selection::SelectionAlgorithm {
        match self {
            AlgorithmArg::Rfe => grimp_core::selection::SelectionAlgorithm::Rfe,
            AlgorithmArg::Nrfe => grimp_core::selection::SelectionAlgorithm::Nrfe,
        }
    }
}

/// Flags shared by every subcommand.
#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Base seed; all randomness derives from it.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads (0 = library default). Results do not depend on it.
    #[arg(long, default_value_t = 0)]
    pub threads: usize,
    /// Output directory.
    #[arg(long, value_name = "DIR")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ForestArgs {
    /// Number of trees per forest.
    #[arg(long, default_value_t = 100)]
    pub trees: usize,
    /// Features sampled per split (default: P/3).
    #[arg(long)]
    pub mtry: Option<usize>,
    /// Minimum rows per leaf.
    #[arg(long, default_value_t = 1)]
    pub min_leaf: usize,
}

impl ForestArgs {
    pub fn to_config(&self, seed: u64) -> grimp_core::forest::ForestConfig {
        grimp_core::forest::ForestConfig {
            num_trees: self.trees,
            mtry: self.mtry,
            min_leaf_size: self.min_leaf,
            seed,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "grimp",
    version,
    about = "Grouped permutation importance for random forests on functional data"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate simulated curve panels or tabular benchmark datasets.
    Simulate(commands::SimulateArgs),
    /// Wavelet-transform a curve panel into a coefficient CSV.
    Dwt(commands::DwtArgs),
    /// Reconstruct a curve panel from a coefficient CSV.
    Idwt(commands::IdwtArgs),
    /// Simultaneously shrink coefficients across curves.
    Shrink(commands::ShrinkArgs),
    /// Grouped backward selection over a coefficient design.
    Select(commands::SelectArgs),
    /// Grouped importance of time groups over the sampling grid.
    Timescan(commands::TimescanArgs),
    /// Run a full reference experiment and write its result tables.
    Experiment(experiments::ExperimentArgs),
}

fn configure_threads(threads: usize) -> Result<(), CliError> {
    #[cfg(feature = "parallel")]
    if threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| CliError::usage(format!("cannot configure {threads} threads: {e}")))?;
    }
    #[cfg(not(feature = "parallel"))]
    let _ = threads;
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Simulate(args) => commands::run_simulate(args),
        Command::Dwt(args) => commands::run_dwt(args),
        Command::Idwt(args) => commands::run_idwt(args),
        Command::Shrink(args) => commands::run_shrink(args),
        Command::Select(args) => commands::run_select(args),
        Command::Timescan(args) => commands::run_timescan(args),
        Command::Experiment(args) => experiments::run_experiment(args),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let threads = match &cli.command {
        Command::Simulate(a) => a.common.threads,
        Command::Dwt(a) => a.common.threads,
        Command::Idwt(a) => a.common.threads,
        Command::Shrink(a) => a.common.threads,
        Command::Select(a) => a.common.threads,
        Command::Timescan(a) => a.common.threads,
        Command::Experiment(a) => a.common.threads,
    };
    if let Err(e) = configure_threads(threads) {
        eprintln!("error: {}", e.message);
        return ExitCode::from(e.code);
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
