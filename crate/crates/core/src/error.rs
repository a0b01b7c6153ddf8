use thiserror::Error;

/// Errors raised by the parameter-generation library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    /// The cofactor is not admissible for the embedding degree.
    #[error("inadmissible parameters: {0}")]
    Inadmissible(String),
    /// The branch factor of a family is not divisible by the cofactor.
    #[error("inconsistent family spec: {0}")]
    InconsistentSpec(String),
    /// A constructed family failed one of its own invariants.
    #[error("family construction failed: {0}")]
    ConstructionFailed(String),
    #[error("CM quadratic is not reducible to a Pell form: {0}")]
    NotPellReducible(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidArgument(msg.into()))
}
