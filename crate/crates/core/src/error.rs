use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A separation result needs more modulus than the input provides.
    #[error("insufficient modulus: {available} does not exceed required {required}")]
    InsufficientModulus { available: f64, required: f64 },

    /// The grid is too coarse to resolve the condenser plates.
    #[error("resolution error: {0}")]
    Resolution(String),

    #[error("no convergence after {sweeps} sweeps (last update {residual:e})")]
    Convergence { sweeps: usize, residual: f64 },

    #[error("unsupported: {0}")]
    Unsupported(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}

/// Shorthand for argument checks.
pub(crate) fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::Domain(msg()))
    }
}
