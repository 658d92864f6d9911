use std::path::PathBuf;

use thiserror::Error;

/// Errors raised anywhere in the simulation pipeline.
#[derive(Debug, Error)]
pub enum Error {
    /// An input violated a type invariant or a precondition.
    #[error("validation error: {0}")]
    Validation(String),

    /// A requested composite dimension exceeds the configured cap.
    #[error("capacity error: {what} needs dimension {requested}, cap is {cap}")]
    Capacity {
        what: &'static str,
        requested: usize,
        cap: usize,
    },

    #[error("eigen-solver did not converge for a {dim}x{dim} matrix")]
    Convergence { dim: usize },

    /// A conservation law failed partway through an evolution.
    #[error("invariant violated at step {step}: {detail}")]
    InvariantViolation { step: usize, detail: String },

    #[error("degenerate series: {0}")]
    DegenerateSeries(String),

    #[error("correlation-length fit failed: {reason}")]
    FitFailure { reason: String, k_stop: usize },

    #[error("integrator failure: {0}")]
    Integrator(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code for the command-line runner.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Validation(_) => 2,
            Error::Capacity { .. } => 3,
            _ => 1,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
