//! Batch driver: simulate, estimate, run Monte Carlo designs, forecast and
//! diagnose from TOML configurations.

pub mod commands;
pub mod config;
pub mod output;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Validation(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("estimator did not converge: {0}")]
    Flagged(String),
    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Io { .. } => 2,
            CliError::Flagged(_) => 3,
            CliError::Internal(_) => 4,
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }
}

impl From<tvstable::Error> for CliError {
    fn from(e: tvstable::Error) -> Self {
        use tvstable::Error as E;
        match e {
            E::InvalidParameter(_)
            | E::InsufficientData { .. }
            | E::NotArRegular { .. }
            | E::NotInvertible(_)
            | E::AsymmetricInnovations(_)
            | E::Degenerate(_)
            | E::Truncation { .. } => CliError::Validation(e.to_string()),
            E::NonFinite { .. } => CliError::Internal(e.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "tvstable", version, about = "Stable tvARMA simulation and estimation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate a path from [model] and [simulate].
    Simulate(CommonArgs),
    /// Estimate a model from a series ([estimate]).
    Estimate(CommonArgs),
    /// Run a Monte Carlo design ([mc]).
    Mc {
        #[command(flatten)]
        common: CommonArgs,
        /// Worker threads (0 = all cores).
        #[arg(long, default_value_t = 0)]
        jobs: usize,
    },
    /// Residual diagnostics of a fitted model ([model], [diagnose]).
    Diagnose(CommonArgs),
    /// Minimum-dispersion forecasts ([model], [predict]).
    Predict(CommonArgs),
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// TOML configuration file.
    #[arg(long, short)]
    pub config: PathBuf,
    /// Output directory (overrides `output` in the configuration).
    #[arg(long, short)]
    pub out: Option<PathBuf>,
    /// Overrides the configured seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Progress messages on stderr.
    #[arg(long, short, action = clap::ArgAction::Count)]
    pub verbose: u8,
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Simulate(a) => commands::simulate(&a),
        Command::Estimate(a) => commands::estimate(&a),
        Command::Mc { common, jobs } => commands::mc(&common, jobs),
        Command::Diagnose(a) => commands::diagnose(&a),
        Command::Predict(a) => commands::predict(&a),
    }
}
