//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A domain constraint on an input value was violated.
    #[error("domain error: {0}")]
    Domain(String),

    /// Adaptive quadrature failed to reach the requested tolerance within
    /// the subdivision budget. Carries the achieved absolute error estimate.
    #[error("quadrature did not converge: achieved error {achieved:.3e}, requested {requested:.3e}")]
    Quadrature { achieved: f64, requested: f64 },

    /// Operator or state dimensions are inconsistent.
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// The enlarged Hilbert space would exceed the configured maximum.
    #[error("enlarged dimension {dim} exceeds maximum {max}")]
    DimensionOverflow { dim: usize, max: usize },

    /// Dense linear algebra (eigensolver) failure.
    #[error("linear algebra error: {0}")]
    Linalg(String),

    /// Time integration failed (step-size underflow, budget exhausted).
    #[error("integration error at t = {t}: {msg}")]
    Integration { t: f64, msg: String },

    /// A physical invariant was breached during evolution.
    #[error("diagnostic error at t = {t}: {msg}")]
    Diagnostic { t: f64, msg: String },

    /// Parameters fall outside the shipped dimension table.
    #[error("dimension table lookup failed: {0}; run `benchmark-dims` to extend the table")]
    TableLookup(String),

    /// The dimension-convergence benchmark hit its cap without converging.
    #[error("benchmark did not converge below delta = {delta}: deviations {deviations:?}")]
    BenchmarkCap { delta: f64, deviations: Vec<(usize, f64)> },

    /// Malformed on-disk data.
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    /// Undefined statistic (zero variance in a correlation input).
    #[error("undefined correlation: {0}")]
    UndefinedCorrelation(String),

    /// Training aborted (non-finite gradient or loss).
    #[error("training aborted: {0}")]
    Training(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }
}
