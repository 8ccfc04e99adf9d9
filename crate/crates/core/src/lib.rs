//! Alphabets, histories, policies, environments and universes over finite,
//! depth-bounded interaction trees, with exact and floating-point backends.

pub mod alphabet;
pub mod distance;
pub mod environment;
pub mod error;
pub mod history;
pub mod logform;
pub mod multiagent;
pub mod policy;
pub mod scalar;
pub mod table;
pub mod universe;

use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};

pub use alphabet::{Alphabet, AlphabetKind, Percept, Signature};
pub use distance::total_variation_k;
pub use environment::{BlendEnvironment, Environment, FnEnvironment, TableEnvironment};
pub use error::{CoreError, Result};
pub use history::{History, JointHistory};
pub use logform::LogLinear;
pub use multiagent::{personal_environment, FnMultiAgentEnv, MultiAgentEnv, PersonalEnvironment, SoloEnv};
pub use policy::{BlendPolicy, FnPolicy, Policy, TablePolicy};
pub use scalar::{q, Rational, Scalar};
pub use universe::{
    check_semimeasure, conditional_action, conditional_percept, continuation_mass, interact,
    ActionPart, Completed, Interaction, PerceptPart, TableUniverse, Universe,
};

/// Deterministic combination of memoization keys.
pub fn hash_keys(keys: &[u64]) -> u64 {
    let mut h = DefaultHasher::new();
    keys.hash(&mut h);
    h.finish()
}

/// Hash of any hashable value, for building memoization keys.
pub fn hash_of<T: Hash + ?Sized>(x: &T) -> u64 {
    let mut h = DefaultHasher::new();
    x.hash(&mut h);
    h.finish()
}
