//! Mixture universes with dual posterior updates on actions and percepts,
//! decoupled mixtures, structural similarity and prediction-loss diagnostics.

pub mod belief;
pub mod class;
pub mod decoupled;
pub mod error;
pub mod grain;
pub mod loss;
pub mod mixture;
pub mod similarity;

pub use belief::{
    belief_trajectory, closed_form_posterior, predict, trajectory_to_jsonl, update_on_action, update_on_percept,
    BeliefRecord, BeliefState,
};
pub use class::{HypothesisClass, Prior};
pub use decoupled::{factor_decoupled, DecoupledFactorization, MixtureEnvironment, MixturePolicy, PairClass};
pub use error::{BayesError, Result};
pub use grain::{grain_of_uncertainty, GrainReport};
pub use loss::{avg_loss_gap, neg_log_weight, prediction_loss, LogBase, LogValue, LossGapReport, LossReport};
pub use mixture::{CompletionMode, MixtureUniverse};
pub use similarity::{avg_structural_similarity, check_fully_supported, structural_similarity};
