use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("delay {delay} exceeds prefix length {n_cpp}")]
    DelayExceedsPrefix { delay: usize, n_cpp: usize },
    #[error("infeasible degree sequence: {0}")]
    InfeasibleDegrees(String),
    #[error("factor node degree {degree} exceeds BP cap {cap}")]
    DegreeCapExceeded { degree: usize, cap: usize },
    #[error("singular system")]
    Singular,
    #[error("parse error: {0}")]
    Parse(String),
    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub(crate) fn check_len(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::LengthMismatch { expected, got })
    }
}
