use thiserror::Error;

use crate::history::History;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CoreError {
    #[error("conditional undefined at zero-mass history {history} (action {action:?}) and no completion attached")]
    UndefinedConditional {
        history: History,
        action: Option<usize>,
    },
    #[error("history of length {len} exceeds declared depth {max}")]
    DepthExceeded { len: usize, max: usize },
    #[error("alphabet mismatch: {0}")]
    AlphabetMismatch(String),
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
    #[error("co-player policy for agent {agent} is not proper at {history}")]
    ImproperCoPolicy { agent: usize, history: String },
    #[error("invalid alphabet: {0}")]
    InvalidAlphabet(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("table error: {0}")]
    Table(String),
    #[error("index {index} out of range for alphabet of size {size}")]
    IndexOutOfRange { index: usize, size: usize },
}

pub type Result<T> = std::result::Result<T, CoreError>;
