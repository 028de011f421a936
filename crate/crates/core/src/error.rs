//! Error type shared by every module.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The q-series is too short for the requested point.
    #[error("needs more terms: truncation order {required} required")]
    NeedsMoreTerms { required: usize },

    /// Bisection was handed a bracket without a sign change.
    #[error("inconsistent bracket: no sign change on [{lo}, {hi}]")]
    InconsistentBracket { lo: f64, hi: f64 },

    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidArgument(msg.into()))
}
