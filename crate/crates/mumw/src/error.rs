//! Single error type shared by every module of the crate.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: {left} vs {right}")]
    DimensionMismatch {
        context: &'static str,
        left: usize,
        right: usize,
    },

    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("hermiticity deviation {deviation:.3e} exceeds tolerance {tolerance:.3e}")]
    NotHermitian { deviation: f64, tolerance: f64 },

    #[error(
        "trace of a Hermitian pairing has imaginary part {imag:.3e}; inputs are not Hermitian"
    )]
    NonRealTrace { imag: f64 },

    #[error("eigenvalue iteration failed to converge for a {dim}x{dim} matrix")]
    EigenFailure { dim: usize },

    #[error("invalid dimension {d}: {reason}")]
    InvalidDimension { d: usize, reason: &'static str },

    #[error("unknown partition scheme '{scheme}' for dimension {d}")]
    UnknownScheme { scheme: String, d: usize },

    #[error("generator axioms violated: {0}")]
    BadGenerators(String),

    #[error("measurement axioms violated: {0}")]
    BadMeasurement(String),

    #[error("construction parameter t = {t} is outside the feasible range (0, {max:.6}]")]
    InfeasibleT { t: f64, max: f64 },

    #[error("element purities are not uniform: spread {spread:.3e} exceeds {tolerance:.3e}")]
    PuritySpread { spread: f64, tolerance: f64 },

    #[error("map is singular: kappa = {kappa:.6} is too close to 1/d = {inverse_d:.6}")]
    SingularMap { kappa: f64, inverse_d: f64 },

    #[error("expected {expected} rotation angles, got {got}")]
    AngleCount { expected: usize, got: usize },

    #[error("rotation verification failed: {0}")]
    BadRotation(String),

    #[error("state validation failed: {0}")]
    BadState(String),

    #[error("parameter out of range: {0}")]
    OutOfRange(String),

    #[error("malformed data: {0}")]
    MalformedData(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
