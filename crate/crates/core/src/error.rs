use thiserror::Error;

use crate::engine::Digit;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("button {button} out of range for {n_buttons} buttons")]
    ButtonOutOfRange { button: usize, n_buttons: usize },

    #[error("digit {0} out of range 0..=9")]
    DigitOutOfRange(u8),

    #[error("invalid coloring: {0}")]
    InvalidColoring(String),

    #[error("hypothesis for digit {0} is inconsistent")]
    InconsistentHypothesis(Digit),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("nothing to split: bisection needs at least 2 candidates, got {0}")]
    NothingToSplit(usize),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A transcript or message failed to parse. `context` names the field
    /// path or position that was being read.
    #[error("parse error at {context}: {message}")]
    Parse { context: String, message: String },

    #[error("replay mismatch: {0}")]
    ReplayMismatch(String),
}

impl Error {
    pub(crate) fn parse(context: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse {
            context: context.into(),
            message: message.into(),
        }
    }
}
