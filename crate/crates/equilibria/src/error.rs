use ebw_bayes::BayesError;
use ebw_core::CoreError;
use ebw_planning::PlanningError;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EquilibriumError {
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error(transparent)]
    Planning(#[from] PlanningError),
    #[error(transparent)]
    Bayes(#[from] BayesError),
    #[error("invalid game: {0}")]
    InvalidGame(String),
    #[error("invalid profile: {0}")]
    InvalidProfile(String),
    #[error("inconsistent completion: {0}")]
    InconsistentCompletion(String),
    #[error("invalid correlation device: {0}")]
    InvalidDevice(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, EquilibriumError>;
