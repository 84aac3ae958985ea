use thiserror::Error;

/// Failure modes shared by every layer of the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Caller supplied shapes or arguments outside an operation's contract.
    #[error("contract violation: {0}")]
    Contract(String),
    /// Mathematical hypothesis of a checker does not hold for the given data.
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("matrix is not positive semidefinite: eigenvalue {eigenvalue:e} is below -{bound:e}")]
    NotPositive { eigenvalue: f64, bound: f64 },
    /// Malformed instance or configuration; carries every problem found.
    #[error("validation failed: {}", .0.join("; "))]
    Validation(Vec<String>),
}

impl Error {
    pub(crate) fn contract(msg: impl Into<String>) -> Self {
        Error::Contract(msg.into())
    }

    pub(crate) fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }

    pub(crate) fn numerical(msg: impl Into<String>) -> Self {
        Error::Numerical(msg.into())
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::Validation(vec![msg.into()])
    }
}

pub type Result<T> = std::result::Result<T, Error>;
