//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("invalid norm spec: {0}")]
    InvalidNormSpec(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A fit interpolated the data or otherwise collapsed (for example the
    /// residual scale fell below 1e-12 in the scaled iteration).
    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    /// The residual distribution has no spread around its absolute mean, so
    /// the regularization formula would divide by zero.
    #[error("degenerate error distribution: {0}")]
    DegenerateErrors(String),

    #[error("factorization failed: {0}")]
    Factorization(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("csv error: {0}")]
    Csv(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
