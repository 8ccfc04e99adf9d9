//! Verification of Nash, dependency, correlated embedded and subjective or
//! objective embedded equilibria, on one-shot games and sequential universes.

pub mod cee;
pub mod dependency;
pub mod dogmatic;
pub mod error;
pub mod game;
pub mod infeasibility;
pub mod nash;
pub mod one_shot;
pub mod sequential;
pub mod simplex;
pub mod verdict;

pub use cee::{check_cee, de_to_cee, nash_to_cee, CorrelatedCompletion, CorrelationDevice, MessagePolicies};
pub use dependency::{check_dependency_eq, DependencyDistribution, DependencyDoc, ParametricJoint, Polynomial};
pub use dogmatic::{dogmatic_best_response_check, dogmatic_mixture, DogmaticUniverse};
pub use error::{EquilibriumError, Result};
pub use game::{GameDoc, MixedProfile, NormalFormGame, Shape};
pub use infeasibility::{ee_infeasibility_search, forced_zeros, FloorResult, InfeasibilityReport, SymbolicCheck};
pub use nash::{best_reply, check_nash, check_subjective_nash};
pub use one_shot::{check_ee_one_shot, check_see_one_shot, ee_players_one_shot, OneShot};
pub use sequential::{
    best_response_gap, check_ee, check_eps_delta_scee, check_eps_scee, check_epsilon_see, check_see,
    BestResponseGap, CheckOptions, EePlayer, EmbeddedPlayer, HistoryDevice,
};
pub use simplex::{LinearProgram, LpOutcome, Relation};
pub use verdict::{Tolerances, Verdict, Witness};
