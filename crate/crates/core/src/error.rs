use thiserror::Error;

/// Errors produced by the finite-field ICA toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{0} is not a prime field order")]
    NotPrime(u32),
    #[error("{0} has no multiplicative inverse")]
    NoInverse(u32),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },
    #[error("matrix is singular")]
    SingularMatrix,
    #[error("capacity exceeded: {0}")]
    Capacity(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("malformed input: {0}")]
    Format(String),
    #[error("truncated input: {0}")]
    Truncation(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::Dimension { expected, found })
    }
}
