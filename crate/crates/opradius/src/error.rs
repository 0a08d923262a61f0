//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by the library and surfaced by the CLI.
///
/// Every variant maps to a stable machine-readable code string via
/// [`Error::code`], which the CLI embeds in its JSON error reports.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix entries must be finite (found NaN or infinity)")]
    NonFiniteEntry,

    #[error("matrices must have at least one row and one column")]
    EmptyMatrix,

    #[error("dimension mismatch: {0}")]
    DimMismatch(String),

    #[error("dimension {dim} exceeds the supported cap of {cap}")]
    DimCapExceeded { dim: usize, cap: usize },

    #[error("matrix is not Hermitian within tolerance (asymmetry {asymmetry:.3e})")]
    NotHermitian { asymmetry: f64 },

    #[error("eigensolver failed to converge for a matrix of dimension {dim}")]
    EigNonConvergence { dim: usize },

    #[error("matrix is not strictly positive at the requested margin (lambda_min {lambda_min:.6e})")]
    NotStrictlyPositive { lambda_min: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("block {index} is not in the algebra (membership residual {residual:.3e})")]
    MembershipViolation { index: usize, residual: f64 },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("malformed JSON input: {0}")]
    Json(String),
}

impl Error {
    /// Stable code string for machine-readable error reports.
    pub fn code(&self) -> &'static str {
        match self {
            Error::NonFiniteEntry => "non-finite-entry",
            Error::EmptyMatrix => "empty-matrix",
            Error::DimMismatch(_) => "dim-mismatch",
            Error::DimCapExceeded { .. } => "dim-cap-exceeded",
            Error::NotHermitian { .. } => "not-hermitian",
            Error::EigNonConvergence { .. } => "eig-non-convergence",
            Error::NotStrictlyPositive { .. } => "not-strictly-positive",
            Error::InvalidParameter(_) => "invalid-parameter",
            Error::MembershipViolation { .. } => "membership-violation",
            Error::Io(_) => "io-error",
            Error::Json(_) => "bad-json",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
