//! Command-line front end of the `hypercutoff` simulator.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;
mod error;

pub use commands::{
    cmd_compare, cmd_ensemble, cmd_simulate, cmd_theory, cmd_theta, limit_params, run_ensemble, time_grid,
    EnsembleRuns, Report,
};
pub use config::{parse_manifest, parse_times, CardinalitySpec, Flags, RunConfig};
pub use error::CliError;

use clap::{Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "hypercutoff", version, about = "Hypergraph preferential attachment with vertex deactivation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// One run: trajectory.csv and degree snapshots.
    Simulate(Flags),
    /// Independent runs: ensemble_Dt.csv, theta_running.csv, concentration.csv.
    Ensemble(Flags),
    /// Solve for θ by fixed-point iteration: theta_iterates.csv.
    Theta(Flags),
    /// Predicted degree fractions: theory_pmf.csv.
    Theory(Flags),
    /// Fit a degree histogram and compare it with the prediction: compare.csv.
    Compare(Flags),
}

/// Resolves the configuration and runs the subcommand.
pub fn execute(command: &Command) -> Result<Report, CliError> {
    type Handler = fn(&RunConfig) -> Result<Report, CliError>;
    let (flags, f): (&Flags, Handler) = match command {
        Command::Simulate(fl) => (fl, cmd_simulate),
        Command::Ensemble(fl) => (fl, cmd_ensemble),
        Command::Theta(fl) => (fl, cmd_theta),
        Command::Theory(fl) => (fl, cmd_theory),
        Command::Compare(fl) => (fl, cmd_compare),
    };
    f(&RunConfig::resolve(flags)?)
}
