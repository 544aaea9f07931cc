use std::io;
use std::path::PathBuf;

use hypercutoff::analysis::AnalysisError;
use hypercutoff::{CardinalityError, ProcessError, TheoryError};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("input error: {0}")]
    Input(String),
    #[error("cannot access {path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("early termination: {0}")]
    Terminated(String),
    #[error("numerical non-convergence: {0}")]
    NonConvergence(String),
}

impl CliError {
    /// 2 for configuration and input problems, 3 for a fatal early
    /// termination, 4 for numerical non-convergence.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Input(_) | CliError::Io { .. } => 2,
            CliError::Terminated(_) => 3,
            CliError::NonConvergence(_) => 4,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>) -> impl FnOnce(io::Error) -> CliError {
        let path = path.into();
        move |source| CliError::Io { path, source }
    }
}

impl From<TheoryError> for CliError {
    fn from(e: TheoryError) -> Self {
        match e {
            TheoryError::NonConvergence { .. } => CliError::NonConvergence(e.to_string()),
            _ => CliError::Config(e.to_string()),
        }
    }
}

impl From<AnalysisError> for CliError {
    fn from(e: AnalysisError) -> Self {
        match e {
            AnalysisError::Theory(t) => t.into(),
            other => CliError::Input(other.to_string()),
        }
    }
}

impl From<ProcessError> for CliError {
    fn from(e: ProcessError) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<CardinalityError> for CliError {
    fn from(e: CardinalityError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<hypercutoff::ParamError> for CliError {
    fn from(e: hypercutoff::ParamError) -> Self {
        CliError::Config(e.to_string())
    }
}
