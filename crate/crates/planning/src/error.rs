use ebw_core::CoreError;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PlanningError {
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error("invalid task: {0}")]
    InvalidTask(String),
    #[error("invalid budget: {0}")]
    InvalidBudget(String),
    #[error("planning from length {len} with horizon {horizon} exceeds model depth {depth}")]
    DepthExceeded { len: usize, horizon: usize, depth: usize },
    #[error("export failed: {0}")]
    Export(String),
}

pub type Result<T> = std::result::Result<T, PlanningError>;
