use thiserror::Error;

/// Errors produced by the numerical routines in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("dimension mismatch: expected {expected} coordinates, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("domain error in {op}: {detail}")]
    Domain { op: &'static str, detail: String },

    #[error("arithmetic domain error in jet `{op}`: {detail}")]
    ArithmeticDomain { op: &'static str, detail: String },

    #[error("singular point: {0}")]
    Singular(String),

    #[error("degenerate point: {0}")]
    Degenerate(String),

    #[error("frame index {index} out of range 1..={max}")]
    IndexOutOfRange { index: usize, max: usize },

    #[error("optimization failed after {iterations} iterations (residual {residual:e})")]
    OptimizationFailure { iterations: usize, residual: f64 },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn domain(op: &'static str, detail: impl Into<String>) -> Self {
        Error::Domain {
            op,
            detail: detail.into(),
        }
    }
}
