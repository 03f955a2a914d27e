//! Command-line front end: argument parsing and the command runners.
//!
//! Exit codes: 0 success, 1 input or format error (and a failed `verify`),
//! 2 no Bayesian inverse, 3 candidate inverse not CPTP.

mod commands;
mod output;

use std::io::Write;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

pub use commands::{cmd_invert, cmd_kraus, cmd_scan, cmd_three_entry, cmd_unscathed, cmd_verify};

pub const EXIT_OK: u8 = 0;
pub const EXIT_INPUT: u8 = 1;
pub const EXIT_NO_INVERSE: u8 = 2;
pub const EXIT_NOT_CPTP: u8 = 3;

pub const THREADS_ENV: &str = "QUBIT_RETRO_THREADS";
pub const DEFAULT_RESOLUTION: usize = 201;
pub const DEFAULT_THREE_ENTRY_RESOLUTION: usize = 8;
pub const DEFAULT_THREE_ENTRY_SAMPLES: usize = 1000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Invert,
    Unscathed,
    Verify,
    Scan,
    Kraus,
    ThreeEntry,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ScanFamily {
    Depolarizing,
    Bb84,
    ThreeEntry,
}

#[derive(Clone, Debug, Parser)]
#[command(name = "qubit-retro", version, about = "Bayesian inverses of unital qubit channels")]
pub struct Cli {
    #[command(subcommand)]
    pub command: CliCommand,
}

#[derive(Clone, Debug, Subcommand)]
pub enum CliCommand {
    /// Construct the Bayesian inverse of a channel at a state.
    Invert(Inputs),
    /// Decide whether a state is unscathed by a unital channel.
    Unscathed(Inputs),
    /// Compare forward and time-reversed two-time expectations.
    Verify(Inputs),
    /// Feasibility region scan; writes CSV and SVG.
    Scan(Inputs),
    /// Kraus operators of a channel.
    Kraus(Inputs),
    /// Sweep Pauli channels with exactly three nonzero probabilities.
    ThreeEntry(Inputs),
}

#[derive(Clone, Debug, Default, clap::Args)]
pub struct Inputs {
    /// Channel JSON file.
    #[arg(long)]
    pub channel: Option<PathBuf>,
    /// State JSON file.
    #[arg(long)]
    pub state: Option<PathBuf>,
    /// Candidate inverse channel JSON file.
    #[arg(long)]
    pub inverse: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub family: Option<ScanFamily>,
    #[arg(long)]
    pub resolution: Option<usize>,
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Bloch samples per channel for the three-entry sweep.
    #[arg(long)]
    pub samples: Option<usize>,
}

/// Validated settings shared by every command.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub command: Command,
    pub channel: Option<PathBuf>,
    pub state: Option<PathBuf>,
    pub inverse: Option<PathBuf>,
    pub family: Option<ScanFamily>,
    pub resolution: Option<usize>,
    pub tol: f64,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub samples: Option<usize>,
}

impl RunConfig {
    pub fn new(command: Command, inputs: Inputs) -> Result<Self> {
        if !(inputs.tol > 0.0 && inputs.tol.is_finite()) {
            bail!("--tol must be a positive number, got {}", inputs.tol);
        }
        if let Some(r) = inputs.resolution {
            if r < 2 {
                bail!("--resolution must be at least 2, got {r}");
            }
        }
        Ok(RunConfig {
            command,
            channel: inputs.channel,
            state: inputs.state,
            inverse: inputs.inverse,
            family: inputs.family,
            resolution: inputs.resolution,
            tol: inputs.tol,
            seed: inputs.seed,
            out: inputs.out,
            samples: inputs.samples,
        })
    }

    pub fn from_cli(cli: Cli) -> Result<Self> {
        let (command, inputs) = match cli.command {
            CliCommand::Invert(i) => (Command::Invert, i),
            CliCommand::Unscathed(i) => (Command::Unscathed, i),
            CliCommand::Verify(i) => (Command::Verify, i),
            CliCommand::Scan(i) => (Command::Scan, i),
            CliCommand::Kraus(i) => (Command::Kraus, i),
            CliCommand::ThreeEntry(i) => (Command::ThreeEntry, i),
        };
        RunConfig::new(command, inputs)
    }

    pub(crate) fn require<'a>(&self, path: &'a Option<PathBuf>, flag: &str) -> Result<&'a PathBuf> {
        path.as_ref().with_context(|| format!("{:?} requires --{flag}", self.command))
    }
}

/// Thread pool honoring `QUBIT_RETRO_THREADS`.
pub fn thread_pool() -> Result<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(value) = std::env::var(THREADS_ENV) {
        let n: usize = value.trim().parse().with_context(|| format!("{THREADS_ENV}={value:?} is not a thread count"))?;
        if n == 0 {
            bail!("{THREADS_ENV} must be at least 1");
        }
        builder = builder.num_threads(n);
    }
    Ok(builder.build()?)
}

/// Runs one command, writing the human-readable report to `out`. Errors are
/// input errors (exit 1); other outcomes come back as the exit code.
pub fn run(config: &RunConfig, out: &mut dyn Write) -> Result<u8> {
    match config.command {
        Command::Invert => cmd_invert(config, out),
        Command::Unscathed => cmd_unscathed(config, out),
        Command::Verify => cmd_verify(config, out),
        Command::Scan => cmd_scan(config, out),
        Command::Kraus => cmd_kraus(config, out),
        Command::ThreeEntry => cmd_three_entry(config, out),
    }
}
