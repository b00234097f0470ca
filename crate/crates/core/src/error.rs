use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    /// A circuit, distribution or word references something that does not exist
    /// or violates a gate invariant.
    #[error("structural error: {0}")]
    Structure(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// The requested enumeration or search is larger than the configured limit.
    #[error("capacity exceeded: {0}")]
    Capacity(String),

    /// Shares that contradict each other.
    #[error("integrity error: {0}")]
    Integrity(String),

    #[error("malformed input at `{path}`: {message}")]
    Parse { path: String, message: String },
}

impl Error {
    pub(crate) fn structure(msg: impl Into<String>) -> Self {
        Error::Structure(msg.into())
    }

    pub(crate) fn parameter(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }

    pub(crate) fn capacity(msg: impl Into<String>) -> Self {
        Error::Capacity(msg.into())
    }
}
