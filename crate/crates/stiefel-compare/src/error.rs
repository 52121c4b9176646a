//! Error type shared across the crate.

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// A dimension, sample count, or parameter failed validation.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Matrix shapes are incompatible for the requested operation.
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    /// A matrix expected to have full column rank is numerically rank-deficient.
    #[error("rank deficient: {0}")]
    RankDeficient(String),

    /// A matrix expected to be positive semidefinite has a significantly
    /// negative eigenvalue.
    #[error("matrix is not positive semidefinite: smallest eigenvalue {0:.3e}")]
    NotPositiveSemidefinite(f64),

    /// A matrix expected to be symmetric is not, beyond tolerance.
    #[error("matrix is not symmetric: max asymmetry {0:.3e}")]
    NotSymmetric(f64),

    /// Columns expected to be orthonormal are not, beyond tolerance.
    #[error("columns are not orthonormal: max deviation from identity {0:.3e}")]
    NotOrthonormal(f64),

    /// An iterative routine failed to reach its convergence tolerance.
    #[error("iteration failed to converge: {0}")]
    NoConvergence(String),

    /// A mathematically guaranteed internal property failed to hold; this
    /// indicates a bug rather than bad input.
    #[error("internal invariant violated: {0}")]
    Invariant(String),

    /// Configuration input (CLI flags or config file) is invalid.
    #[error("configuration error: {0}")]
    Config(String),

    /// Underlying I/O failure while reading config or writing reports.
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    /// Malformed JSON in a config or matrix file.
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
