use thiserror::Error;

/// Errors raised by the structure-learning kernels.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not positive definite ({context})")]
    NotPositiveDefinite { context: String },

    #[error("insufficient samples: have {n}, need more than {needed}")]
    InsufficientSamples { n: usize, needed: usize },

    #[error("degenerate correlation: |rho| = {value} reached the unit boundary")]
    DegenerateCorrelation { value: f64 },

    #[error("lasso did not converge after {iterations} sweeps (kkt residual {kkt_residual:e})")]
    LassoNotConverged { iterations: usize, kkt_residual: f64 },

    #[error("subset enumeration of {subsets} exceeds cap {cap}")]
    EnumerationCap { subsets: u128, cap: u128 },

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidArgument(msg.into()))
}
