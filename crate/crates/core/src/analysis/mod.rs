//! Empirical quantities computed from traces and degree histograms.

mod compare;
mod fit;
mod series;
mod tails;

pub use compare::{compare_to_theory, CompareRow, Comparison};
pub use fit::{fit_powerlaw, fit_powerlaw_cutoff, ln_partition, log_likelihood, FitResult, BETA_RANGE};
pub use series::{
    concentration_report, moments_at, slope_fit, theta_convergence, theta_convergence_ensemble,
    ConcentrationRow, LinearFit, Moments,
};
pub use tails::{ccdf, log_binned_pmf, LogBin};

pub use crate::histogram::{ClassCounts, DegreeHistogram};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalysisError {
    #[error("degree histogram is empty")]
    EmptyHistogram,
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("not enough data: {0}")]
    InsufficientData(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Theory(#[from] crate::theory::TheoryError),
}
