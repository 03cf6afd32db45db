use thiserror::Error;

/// Errors raised by graph construction, benchmarks, schemes and certificates.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    Input(String),
    #[error("capacity exceeded: {0}")]
    Capacity(String),
    #[error("no closed-form moments for component: {0}")]
    UnsupportedExact(String),
    #[error("no improvement possible: {0}")]
    NoImprovement(String),
    #[error("linear program {0}")]
    Lp(String),
    #[error("no stable solution found")]
    NoStableFound,
    #[error("internal check failed: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn input<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Input(msg.into()))
}
