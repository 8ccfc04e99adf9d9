use ebw_core::{CoreError, History};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BayesError {
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error("zero predictive mass at {history} (action {action:?}, percept {percept:?})")]
    ZeroPredictiveMass {
        history: History,
        action: Option<usize>,
        percept: Option<usize>,
    },
    #[error("support violation: λ({history}) > 0 but ρ({history}) = 0")]
    SupportViolation { history: History },
    #[error("class member {label} is not fully supported at {history}")]
    NotFullySupported { label: String, history: String },
    #[error("invalid prior: {0}")]
    InvalidPrior(String),
    #[error("invalid class: {0}")]
    InvalidClass(String),
}

pub type Result<T> = std::result::Result<T, BayesError>;

impl From<BayesError> for CoreError {
    fn from(e: BayesError) -> Self {
        match e {
            BayesError::Core(c) => c,
            BayesError::ZeroPredictiveMass { history, action, .. } => {
                CoreError::UndefinedConditional { history, action }
            }
            other => CoreError::InvalidDistribution(other.to_string()),
        }
    }
}
