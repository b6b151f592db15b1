//! Command-line driver: configuration loading, the `simulate`, `potential`,
//! `period` and `verify` commands, and their file formats.

// `!(x > 0.0)` is used deliberately so that NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod verify;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use error::CliError;

#[derive(Debug, Parser)]
#[command(name = "tippe", version, about = "Tippe top simulation and potential analysis")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct IoArgs {
    /// JSON configuration file.
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Integrate the gliding equations and write the trajectory.
    Simulate(IoArgs),
    /// Tabulate the effective potential and its minimum path.
    Potential(IoArgs),
    /// Tabulate nutation periods and their bounds.
    Period(IoArgs),
    /// Run the invariant suite and the acceptance criteria.
    Verify {
        /// Seed of the randomized property checks.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Worker threads; all cores when absent.
        #[arg(long)]
        jobs: Option<usize>,
    },
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Simulate(io) => commands::simulate::run(&io.config, &io.out),
        Command::Potential(io) => commands::potential::run(&io.config, &io.out),
        Command::Period(io) => commands::period::run(&io.config, &io.out),
        Command::Verify { seed, jobs } => verify::run(seed, jobs),
    }
}
