use thiserror::Error;

/// Errors shared by every module of the crate.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum Error {
    /// Input outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// An enumeration or engine limit was exceeded.
    #[error("capacity exceeded: {0}")]
    Capacity(String),

    /// A solver scanned up to its configured limit without certifying any candidate.
    #[error("no certified solution within cap: {0}")]
    UnsatWithinCap(String),

    /// Zeta or Euler product queried outside its region of convergence.
    #[error("divergent query: {0}")]
    Divergence(String),

    /// Malformed textual input (field, form, model or scheme syntax).
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn capacity(msg: impl Into<String>) -> Self {
        Error::Capacity(msg.into())
    }

    pub fn parse(msg: impl Into<String>) -> Self {
        Error::Parse(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
