//! The Bayesian mixture universe ρ(h) = Σ_λ w(λ) λ(h).

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use ebw_core::{CoreError, History, Scalar, Signature, Universe};

use crate::belief::{carry_action, carry_percept, update_on_action, update_on_percept, BeliefState};
use crate::class::{HypothesisClass, Prior};
use crate::error::{BayesError, Result};

/// How ρ answers conditionals at prefixes where its own mass is zero.
#[derive(Clone)]
pub enum CompletionMode<P: Scalar> {
    /// `UndefinedConditional`.
    Strict,
    /// Posterior carried unchanged across a zero-mass symbol; members answer
    /// with their own completed conditionals.
    Tremble,
    /// An explicit universe supplies the conditionals.
    Universe(Arc<dyn Universe<P>>),
}

type PosteriorKey = (History, Option<usize>);

pub struct MixtureUniverse<P: Scalar> {
    class: HypothesisClass<P>,
    prior: Prior<P>,
    completion: CompletionMode<P>,
    cache: Mutex<HashMap<PosteriorKey, Option<Arc<BeliefState<P>>>>>,
}

impl<P: Scalar> MixtureUniverse<P> {
    pub fn new(class: HypothesisClass<P>, prior: Prior<P>) -> Result<Self> {
        if class.len() != prior.len() {
            return Err(BayesError::InvalidPrior(format!(
                "{} weights for {} universes",
                prior.len(),
                class.len()
            )));
        }
        Ok(MixtureUniverse {
            class,
            prior,
            completion: CompletionMode::Strict,
            cache: Mutex::new(HashMap::new()),
        })
    }

    pub fn with_completion(mut self, mode: CompletionMode<P>) -> Result<Self> {
        if let CompletionMode::Universe(u) = &mode {
            self.class.signature().matches(u.signature())?;
        }
        self.completion = mode;
        self.cache = Mutex::new(HashMap::new());
        Ok(self)
    }

    pub fn class(&self) -> &HypothesisClass<P> {
        &self.class
    }

    pub fn prior(&self) -> &Prior<P> {
        &self.prior
    }

    pub fn completion(&self) -> &CompletionMode<P> {
        &self.completion
    }

    /// Posterior after h (and a pending action, if given). `None` when the
    /// conditioning prefix has zero mass and the mode is not `Tremble`.
    pub fn belief(&self, h: &History, dangling: Option<usize>) -> Result<Option<Arc<BeliefState<P>>>> {
        let key = (h.clone(), dangling);
        if let Some(b) = self.cache.lock().expect("posterior cache poisoned").get(&key) {
            return Ok(b.clone());
        }
        let out = match dangling {
            None if h.is_empty() => Some(Arc::new(BeliefState::from_prior(&self.prior))),
            None => {
                let (a, e) = h.last().expect("non-empty");
                match self.belief(&h.prefix(h.len() - 1), Some(a))? {
                    None => None,
                    Some(parent) => match update_on_percept(&self.class, &parent, e) {
                        Ok(b) => Some(Arc::new(b)),
                        Err(BayesError::ZeroPredictiveMass { .. }) => self.on_zero(|| carry_percept(&parent, e)),
                        Err(err) => return Err(err),
                    },
                }
            }
            Some(a) => match self.belief(h, None)? {
                None => None,
                Some(parent) => match update_on_action(&self.class, &parent, a) {
                    Ok(b) => Some(Arc::new(b)),
                    Err(BayesError::ZeroPredictiveMass { .. }) => self.on_zero(|| carry_action(&parent, a)),
                    Err(err) => return Err(err),
                },
            },
        };
        self.cache
            .lock()
            .expect("posterior cache poisoned")
            .insert(key, out.clone());
        Ok(out)
    }

    fn on_zero(&self, carry: impl FnOnce() -> BeliefState<P>) -> Option<Arc<BeliefState<P>>> {
        match self.completion {
            CompletionMode::Tremble => Some(Arc::new(carry())),
            _ => None,
        }
    }

    /// Posterior weights w(λ|h); error if h has zero mass under `Strict`.
    pub fn posterior(&self, h: &History) -> Result<Vec<P>> {
        self.belief(h, None)?
            .map(|b| b.weights().to_vec())
            .ok_or_else(|| BayesError::ZeroPredictiveMass {
                history: h.clone(),
                action: None,
                percept: None,
            })
    }

    pub fn clear_cache(&self) {
        self.cache.lock().expect("posterior cache poisoned").clear();
    }
}

impl<P: Scalar> Universe<P> for MixtureUniverse<P> {
    fn signature(&self) -> &Signature {
        self.class.signature()
    }

    fn mass(&self, h: &History) -> ebw_core::Result<P> {
        let mut s = P::zero();
        for (u, w) in self.class.members().iter().zip(self.prior.weights()) {
            s = s + w.clone() * u.mass(h)?;
        }
        Ok(s)
    }

    fn mass_action(&self, h: &History, a: usize) -> ebw_core::Result<P> {
        let mut s = P::zero();
        for (u, w) in self.class.members().iter().zip(self.prior.weights()) {
            s = s + w.clone() * u.mass_action(h, a)?;
        }
        Ok(s)
    }

    fn action_dist(&self, h: &History) -> ebw_core::Result<Vec<P>> {
        self.signature().check_extend(h.len())?;
        match self.belief(h, None)? {
            Some(b) => Ok(crate::belief::predict(&self.class, &b)?),
            None => match &self.completion {
                CompletionMode::Universe(c) => c.action_dist(h),
                _ => Err(CoreError::UndefinedConditional {
                    history: h.clone(),
                    action: None,
                }),
            },
        }
    }

    fn percept_dist(&self, h: &History, a: usize) -> ebw_core::Result<Vec<P>> {
        self.signature().check_extend(h.len())?;
        self.signature().actions.check(a)?;
        match self.belief(h, Some(a))? {
            Some(b) => Ok(crate::belief::predict(&self.class, &b)?),
            None => match &self.completion {
                CompletionMode::Universe(c) => c.percept_dist(h, a),
                _ => Err(CoreError::UndefinedConditional {
                    history: h.clone(),
                    action: Some(a),
                }),
            },
        }
    }

    fn state_key(&self, h: &History) -> Option<u64> {
        let b = self.belief(h, None).ok()??;
        let mut parts: Vec<u64> = Vec::new();
        for (i, w) in b.weights().iter().enumerate() {
            if w.is_zero() {
                continue;
            }
            parts.push(i as u64);
            parts.push(self.class.member(i).state_key(h)?);
            parts.push(ebw_core::hash_of(&w.token()));
        }
        Some(ebw_core::hash_keys(&parts))
    }
}
