//! Error types shared across the crate.

use thiserror::Error;

/// Errors produced by dataset handling, model fitting and interpretability
/// routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),

    /// Spec file / dataset mismatch or malformed spec.
    #[error("spec error: {0}")]
    Spec(String),

    /// Data fails a declared invariant (binary values, one-hot rows, ...).
    #[error("validation error: {0}")]
    Validation(String),

    /// Cell that should be numeric could not be parsed.
    #[error("non-numeric value {value:?} in column {column} at row {row}")]
    NonNumeric {
        column: String,
        row: usize,
        value: String,
    },

    /// Target column has a missing entry; target missingness is rejected.
    #[error("missing target value at row {0}")]
    MissingTarget(usize),

    #[error("unknown column {0:?}")]
    UnknownColumn(String),

    /// Dimension mismatch between a model and the rows it is asked to score.
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    Dimension { expected: usize, actual: usize },

    /// Numerical failure (singular system, non-positive-definite kernel, ...).
    #[error("numeric error: {0}")]
    Numeric(String),

    /// Design matrix is rank deficient beyond the stated tolerance.
    #[error("singular design matrix: rank {rank} < {columns} columns (tolerance {tolerance:e})")]
    Singular {
        rank: usize,
        columns: usize,
        tolerance: f64,
    },

    /// Iterative solver failed to converge within its sweep budget.
    #[error("no convergence after {sweeps} sweeps (last max coefficient change {last_change:e})")]
    NoConvergence { sweeps: usize, last_change: f64 },

    /// Gradient descent produced a non-finite loss.
    #[error("training diverged (non-finite loss) at learning rate {learning_rate}")]
    Diverged { learning_rate: f64 },

    /// H-statistic denominator is degenerate (two-dimensional PD constant).
    #[error("H statistic undefined for ({j}, {k}): two-dimensional partial dependence is constant")]
    UndefinedH { j: String, k: String },

    /// Serialized model version is newer than this build supports.
    #[error("model file version {found} is newer than supported version {supported}")]
    UnsupportedVersion { found: u32, supported: u32 },

    #[error("{0}")]
    InvalidArgument(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    pub(crate) fn numeric(msg: impl Into<String>) -> Self {
        Error::Numeric(msg.into())
    }
}
