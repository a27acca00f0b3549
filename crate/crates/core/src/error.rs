use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix of dimension {dim} is not positive definite (last damping tried: {damping:e})")]
    NotPositiveDefinite { dim: usize, damping: f64 },

    #[error("matrix is not Hermitian (max deviation {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("invalid dimensions: {0}")]
    InvalidDimensions(String),

    #[error("loss expectation vanishes (|L| = {0:e})")]
    ZeroLoss(f64),

    #[error("outside the domain: {0}")]
    DomainError(String),

    #[error("non-finite gradient entry at index {0}")]
    NonFiniteGradient(usize),

    #[error("non-finite loss")]
    NonFiniteLoss,

    #[error("no samples left after trimming {removed} of {len}")]
    EmptyAfterTrim { len: usize, removed: usize },

    #[error("no instance was solved by any method")]
    NoSolvedInstances,

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub(crate) fn ensure_dims(ok: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidDimensions(msg()))
    }
}
