use thiserror::Error;

use crate::lp::LpError;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("point index {index} out of range for {len} points")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("non-finite value in {0}")]
    NonFinite(String),
    #[error("invalid function system: {0}")]
    InvalidSystem(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    /// An invariant that the theory guarantees did not hold numerically.
    #[error("verification failed: {0}")]
    Verification(String),
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("malformed CSV: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    /// True for errors caused by the input rather than by a failed check.
    pub fn is_input_error(&self) -> bool {
        !matches!(self, Error::Verification(_) | Error::Lp(LpError::IterationLimit(_)))
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
