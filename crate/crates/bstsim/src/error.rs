use std::fmt;

/// Errors reported by the simulators, oracles and writers.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A caller-supplied argument is outside the documented domain.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    /// A precondition on internal state was violated by the call.
    #[error("contract violation: {0}")]
    Contract(String),
    /// The request would exceed a hard memory or step budget.
    #[error("resource limit exceeded: {0}")]
    Resource(String),
    /// An intermediate value left the numerically safe range.
    #[error("numeric range: {0}")]
    NumericRange(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn invalid(msg: impl fmt::Display) -> Self {
        Error::InvalidArgument(msg.to_string())
    }

    pub fn contract(msg: impl fmt::Display) -> Self {
        Error::Contract(msg.to_string())
    }

    pub fn resource(msg: impl fmt::Display) -> Self {
        Error::Resource(msg.to_string())
    }
}
