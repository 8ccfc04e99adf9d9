//! The worked constructions as parameterized factories: the prisoner's
//! dilemma and its repeated twin variant, the ν_copy mixture, μ_{R,k}, the
//! dogmatic mixture and the SEE-but-not-EE game.

pub mod error;
pub mod games;
pub mod mu_rk;
pub mod params;
pub mod repeated;
pub mod twin;

pub use ebw_equilibria::{dogmatic_mixture, DogmaticUniverse};
pub use error::{Result, ScenarioError};
pub use games::{prisoner_dilemma, see_not_ee_beliefs, see_not_ee_game, COOPERATE, DEFECT};
pub use mu_rk::{MuRk, DOWN, ONE, SAFE, UP, ZERO};
pub use params::{Num, ScenarioId, ScenarioParams};
pub use repeated::{CopyEnvironment, OpponentEnvironment, RepeatedGame};
pub use twin::{
    cooperation_onset, m_defect, m_of, m_star, q_gap_formula, switch_policy_class, symmetric_history, threshold,
    twin_pd, twin_pd_prior, NamedPolicy, Onset, SwitchPolicy, TwinPd, TwinPrior, COPY_LABEL,
};
