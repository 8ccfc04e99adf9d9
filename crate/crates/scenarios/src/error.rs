use ebw_bayes::BayesError;
use ebw_core::CoreError;
use ebw_equilibria::EquilibriumError;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScenarioError {
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error(transparent)]
    Bayes(#[from] BayesError),
    #[error(transparent)]
    Equilibrium(#[from] EquilibriumError),
    #[error("parameter {name} = {value} out of range: {rule}")]
    OutOfRange { name: String, value: String, rule: String },
    #[error("unknown scenario {0:?}")]
    UnknownScenario(String),
    #[error("invalid scenario: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, ScenarioError>;

pub(crate) fn out_of_range(name: &str, value: impl ToString, rule: &str) -> ScenarioError {
    ScenarioError::OutOfRange {
        name: name.to_string(),
        value: value.to_string(),
        rule: rule.to_string(),
    }
}
