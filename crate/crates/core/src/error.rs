use thiserror::Error;

/// Errors raised by the kernels and by the operator-level routines built on them.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is numerically singular (pivot {pivot:e} at column {column})")]
    Singular { column: usize, pivot: f64 },

    #[error("matrix is not Hermitian (relative asymmetry {asymmetry:e})")]
    NotHermitian { asymmetry: f64 },

    #[error("matrix exponential out of range (1-norm {norm:e})")]
    Range { norm: f64 },

    #[error("rejected input: {0}")]
    RejectedInput(String),

    /// `I - T` is numerically singular, so `T` has eigenvalue one.
    #[error("operator has eigenvalue one; inverse Cayley transform undefined")]
    EigenvalueOne,

    #[error("internal consistency error: {0}")]
    Internal(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
