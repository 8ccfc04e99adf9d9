use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Core(#[from] ebw_core::CoreError),
    #[error(transparent)]
    Bayes(#[from] ebw_bayes::BayesError),
    #[error(transparent)]
    Planning(#[from] ebw_planning::PlanningError),
    #[error(transparent)]
    Equilibrium(#[from] ebw_equilibria::EquilibriumError),
    #[error(transparent)]
    Scenario(#[from] ebw_scenarios::ScenarioError),
    #[error("invalid experiment: {0}")]
    Config(String),
    #[error("zero predictive mass at step {step}: {detail}")]
    ZeroPredictiveMass { step: usize, detail: String },
    #[error("step {t} outside the record of length {len}")]
    IndexBounds { t: usize, len: usize },
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("parse: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, HarnessError>;

pub(crate) fn config(msg: impl Into<String>) -> HarnessError {
    HarnessError::Config(msg.into())
}
