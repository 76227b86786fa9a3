use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain bounds out of order: L1 = {l1} must exceed L0 = {l0}")]
    DomainOrder { l0: f64, l1: f64 },

    #[error("grid too small: J = {0}, need J >= 2")]
    GridSize(usize),

    #[error("scheme weight alpha = {0} outside [0, 0.5]")]
    Weight(f64),

    #[error("{name} must be positive, got {value}")]
    NonPositive { name: &'static str, value: f64 },

    #[error("node index ({j}, {m}) outside 0..={max}")]
    IndexOutOfRange { j: usize, m: usize, max: usize },

    #[error("dimension mismatch: {context}")]
    DimensionMismatch { context: String },

    /// The splitting around ½I is not a contraction at this resolution.
    #[error("contraction violated: q = {q:.6e} >= 1 (time step too large for this mesh)")]
    ContractionViolation { q: f64 },

    #[error("fixed-point solve did not converge in {iterations} iterations (residual {residual:.3e})")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("singular Kronecker system: pivot {pivot:.3e} below threshold {threshold:.3e}")]
    Singular { pivot: f64, threshold: f64 },

    #[error("Kronecker system side {side} exceeds cap {cap}")]
    CapExceeded { side: usize, cap: usize },

    #[error("non-finite values at step {step}")]
    BlowUp { step: usize },

    #[error("step {step}: {source}")]
    AtStep {
        step: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("profile '{0}' lacks the analytic data required here")]
    ProfileIncomplete(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("config parse error at line {line}, column {column}: {message}")]
    ConfigParse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("config validation: {key} {constraint}")]
    ConfigValidation { key: String, constraint: String },

    #[error("{path}: line {line}: {message}")]
    Format {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("{path}: expected {expected} values, found {found}")]
    CountMismatch {
        path: PathBuf,
        expected: usize,
        found: usize,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for failures of the numerics (as opposed to bad input or I/O).
    pub fn is_numerical(&self) -> bool {
        match self {
            Error::ContractionViolation { .. }
            | Error::NonConvergence { .. }
            | Error::Singular { .. }
            | Error::BlowUp { .. } => true,
            Error::AtStep { source, .. } => source.is_numerical(),
            _ => false,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn mismatch(context: impl Into<String>) -> Self {
        Error::DimensionMismatch {
            context: context.into(),
        }
    }
}
