//! Classes of explicit (policy, environment) pairs and their decoupled form:
//! a mixture policy ζ and a mixture environment ξ with separate posteriors.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use ebw_core::{interact, CoreError, Environment, History, Interaction, Policy, Scalar, Signature, Universe};

use crate::class::{HypothesisClass, Prior};
use crate::error::{BayesError, Result};
use crate::mixture::{CompletionMode, MixtureUniverse};

/// Universes λ = ν^π indexed by (policy i, environment j) with a joint prior.
#[derive(Clone)]
pub struct PairClass<P: Scalar> {
    policies: Vec<(String, Arc<dyn Policy<P>>)>,
    envs: Vec<(String, Arc<dyn Environment<P>>)>,
    weights: Vec<Vec<P>>,
    sig: Signature,
}

impl<P: Scalar> PairClass<P> {
    /// `weights[i][j]` is the prior of (policy i, environment j); zeros allowed.
    pub fn new(
        policies: Vec<(String, Arc<dyn Policy<P>>)>,
        envs: Vec<(String, Arc<dyn Environment<P>>)>,
        weights: Vec<Vec<P>>,
    ) -> Result<Self> {
        let first = policies
            .first()
            .ok_or_else(|| BayesError::InvalidClass("no policies".into()))?;
        if envs.is_empty() {
            return Err(BayesError::InvalidClass("no environments".into()));
        }
        let mut sig = first.1.signature().clone();
        for (_, p) in &policies {
            sig.matches(p.signature())?;
            sig.depth = sig.depth.min(p.signature().depth);
        }
        for (_, e) in &envs {
            sig.matches(e.signature())?;
            sig.depth = sig.depth.min(e.signature().depth);
        }
        if weights.len() != policies.len() || weights.iter().any(|r| r.len() != envs.len()) {
            return Err(BayesError::InvalidPrior("weight matrix shape".into()));
        }
        if weights.iter().flatten().any(|w| *w < P::zero()) {
            return Err(BayesError::InvalidPrior("negative weight".into()));
        }
        let total: P = weights.iter().flatten().cloned().sum();
        if !total.is_positive() {
            return Err(BayesError::InvalidPrior("zero total weight".into()));
        }
        let over = if P::EXACT { total > P::one() } else { total.to_f64() > 1.0 + 1e-9 };
        if over {
            return Err(BayesError::InvalidPrior(format!("total weight {} exceeds 1", total)));
        }
        Ok(PairClass {
            policies,
            envs,
            weights,
            sig,
        })
    }

    pub fn signature(&self) -> &Signature {
        &self.sig
    }

    pub fn policies(&self) -> &[(String, Arc<dyn Policy<P>>)] {
        &self.policies
    }

    pub fn environments(&self) -> &[(String, Arc<dyn Environment<P>>)] {
        &self.envs
    }

    pub fn weights(&self) -> &[Vec<P>] {
        &self.weights
    }

    pub fn total(&self) -> P {
        self.weights.iter().flatten().cloned().sum()
    }

    /// w(π) = Σ_ν w(π, ν).
    pub fn policy_marginal(&self) -> Vec<P> {
        self.weights.iter().map(|r| r.iter().cloned().sum()).collect()
    }

    /// w(ν) = Σ_π w(π, ν).
    pub fn env_marginal(&self) -> Vec<P> {
        (0..self.envs.len())
            .map(|j| self.weights.iter().map(|r| r[j].clone()).sum())
            .collect()
    }

    /// Product weights w(π)w(ν)/Σw, which have the same marginals.
    pub fn product_weights(&self) -> Vec<Vec<P>> {
        let wp = self.policy_marginal();
        let we = self.env_marginal();
        let t = self.total();
        wp.iter()
            .map(|p| we.iter().map(|e| p.clone() * e.clone() / t.clone()).collect())
            .collect()
    }

    /// True iff w(π, ν) = w(π) w(ν) (up to the total) for every pair.
    pub fn is_decoupled(&self) -> bool {
        let prod = self.product_weights();
        self.weights
            .iter()
            .flatten()
            .zip(prod.iter().flatten())
            .all(|(w, p)| w.approx_eq(p, 1e-12))
    }

    pub fn pair_label(&self, i: usize, j: usize) -> String {
        format!("{}|{}", self.policies[i].0, self.envs[j].0)
    }

    /// ν^π for policy i and environment j, with factor completion.
    pub fn universe(&self, i: usize, j: usize) -> Result<Interaction<P>> {
        Ok(interact(self.policies[i].1.clone(), self.envs[j].1.clone())?.with_factor_completion())
    }

    fn mixture_from(&self, weights: &[Vec<P>], mode: CompletionMode<P>) -> Result<MixtureUniverse<P>> {
        let mut members: Vec<(String, Arc<dyn Universe<P>>)> = Vec::new();
        let mut ws = Vec::new();
        for (i, row) in weights.iter().enumerate() {
            for (j, w) in row.iter().enumerate() {
                if w.is_positive() {
                    members.push((self.pair_label(i, j), Arc::new(self.universe(i, j)?)));
                    ws.push(w.clone());
                }
            }
        }
        MixtureUniverse::new(HypothesisClass::new(members)?, Prior::new(ws)?)?.with_completion(mode)
    }

    /// ρ over the pairs with positive joint weight.
    pub fn coupled_mixture(&self, mode: CompletionMode<P>) -> Result<MixtureUniverse<P>> {
        self.mixture_from(&self.weights, mode)
    }

    /// ρ_d over all pairs with the product of the marginal priors.
    pub fn decoupled_mixture(&self, mode: CompletionMode<P>) -> Result<MixtureUniverse<P>> {
        self.mixture_from(&self.product_weights(), mode)
    }
}

/// ζ(a|h) = Σ_π w(π|h) π(a|h), with w(π|h) ∝ w(π) Π_t π(a_t|h_<t).
pub struct MixturePolicy<P: Scalar> {
    sig: Signature,
    members: Vec<Arc<dyn Policy<P>>>,
    prior: Vec<P>,
    cache: Mutex<HashMap<History, Option<Arc<Vec<P>>>>>,
}

impl<P: Scalar> MixturePolicy<P> {
    pub fn new(members: Vec<Arc<dyn Policy<P>>>, prior: Vec<P>) -> Result<Self> {
        let first = members
            .first()
            .ok_or_else(|| BayesError::InvalidClass("empty policy class".into()))?;
        if prior.len() != members.len() {
            return Err(BayesError::InvalidPrior("policy prior length".into()));
        }
        let mut sig = first.signature().clone();
        for m in &members {
            sig.matches(m.signature())?;
            sig.depth = sig.depth.min(m.signature().depth);
        }
        Ok(MixturePolicy {
            sig,
            members,
            prior,
            cache: Mutex::new(HashMap::new()),
        })
    }

    /// w(π|h); `None` when no policy in the class produces h's actions.
    pub fn posterior(&self, h: &History) -> ebw_core::Result<Option<Arc<Vec<P>>>> {
        if let Some(w) = self.cache.lock().expect("cache poisoned").get(h) {
            return Ok(w.clone());
        }
        let out = if h.is_empty() {
            normalize(self.prior.clone())
        } else {
            let parent = h.prefix(h.len() - 1);
            let (a, _) = h.last().expect("non-empty");
            match self.posterior(&parent)? {
                None => None,
                Some(w) => {
                    let mut next = Vec::with_capacity(w.len());
                    for (m, wi) in self.members.iter().zip(w.iter()) {
                        next.push(if wi.is_zero() {
                            P::zero()
                        } else {
                            wi.clone() * m.dist(&parent)?[a].clone()
                        });
                    }
                    normalize(next)
                }
            }
        };
        self.cache.lock().expect("cache poisoned").insert(h.clone(), out.clone());
        Ok(out)
    }
}

impl<P: Scalar> Policy<P> for MixturePolicy<P> {
    fn signature(&self) -> &Signature {
        &self.sig
    }

    fn dist(&self, h: &History) -> ebw_core::Result<Vec<P>> {
        self.sig.check_extend(h.len())?;
        let w = self.posterior(h)?.ok_or_else(|| CoreError::UndefinedConditional {
            history: h.clone(),
            action: None,
        })?;
        let mut out = vec![P::zero(); self.sig.n_actions()];
        for (m, wi) in self.members.iter().zip(w.iter()) {
            if wi.is_zero() {
                continue;
            }
            for (o, x) in out.iter_mut().zip(m.dist(h)?) {
                *o = o.clone() + wi.clone() * x;
            }
        }
        Ok(out)
    }

    fn state_key(&self, h: &History) -> Option<u64> {
        let w = self.posterior(h).ok()??;
        let mut parts = Vec::new();
        for (i, (m, wi)) in self.members.iter().zip(w.iter()).enumerate() {
            if wi.is_zero() {
                continue;
            }
            parts.extend([i as u64, m.state_key(h)?, ebw_core::hash_of(&wi.token())]);
        }
        Some(ebw_core::hash_keys(&parts))
    }
}

/// ξ(e|h a) = Σ_ν w(ν|h) ν(e|h a), with w(ν|h) ∝ w(ν) Π_t ν(e_t|h_<t a_t).
pub struct MixtureEnvironment<P: Scalar> {
    sig: Signature,
    labels: Vec<String>,
    members: Vec<Arc<dyn Environment<P>>>,
    prior: Vec<P>,
    cache: Mutex<HashMap<History, Option<Arc<Vec<P>>>>>,
}

impl<P: Scalar> MixtureEnvironment<P> {
    pub fn new(members: Vec<(String, Arc<dyn Environment<P>>)>, prior: Vec<P>) -> Result<Self> {
        let first = members
            .first()
            .ok_or_else(|| BayesError::InvalidClass("empty environment class".into()))?;
        if prior.len() != members.len() {
            return Err(BayesError::InvalidPrior("environment prior length".into()));
        }
        let mut sig = first.1.signature().clone();
        for (_, m) in &members {
            sig.matches(m.signature())?;
            sig.depth = sig.depth.min(m.signature().depth);
        }
        Ok(MixtureEnvironment {
            sig,
            labels: members.iter().map(|m| m.0.clone()).collect(),
            members: members.into_iter().map(|m| m.1).collect(),
            prior,
            cache: Mutex::new(HashMap::new()),
        })
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// w(ν|h); `None` when no environment in the class produces h's percepts.
    pub fn posterior(&self, h: &History) -> ebw_core::Result<Option<Arc<Vec<P>>>> {
        if let Some(w) = self.cache.lock().expect("cache poisoned").get(h) {
            return Ok(w.clone());
        }
        let out = if h.is_empty() {
            normalize(self.prior.clone())
        } else {
            let parent = h.prefix(h.len() - 1);
            let (a, e) = h.last().expect("non-empty");
            match self.posterior(&parent)? {
                None => None,
                Some(w) => {
                    let mut next = Vec::with_capacity(w.len());
                    for (m, wi) in self.members.iter().zip(w.iter()) {
                        next.push(if wi.is_zero() {
                            P::zero()
                        } else {
                            wi.clone() * m.dist(&parent, a)?[e].clone()
                        });
                    }
                    normalize(next)
                }
            }
        };
        self.cache.lock().expect("cache poisoned").insert(h.clone(), out.clone());
        Ok(out)
    }
}

impl<P: Scalar> Environment<P> for MixtureEnvironment<P> {
    fn signature(&self) -> &Signature {
        &self.sig
    }

    fn dist(&self, h: &History, a: usize) -> ebw_core::Result<Vec<P>> {
        self.sig.check_extend(h.len())?;
        let w = self.posterior(h)?.ok_or_else(|| CoreError::UndefinedConditional {
            history: h.clone(),
            action: Some(a),
        })?;
        let mut out = vec![P::zero(); self.sig.n_percepts()];
        for (m, wi) in self.members.iter().zip(w.iter()) {
            if wi.is_zero() {
                continue;
            }
            for (o, x) in out.iter_mut().zip(m.dist(h, a)?) {
                *o = o.clone() + wi.clone() * x;
            }
        }
        Ok(out)
    }

    fn state_key(&self, h: &History) -> Option<u64> {
        let w = self.posterior(h).ok()??;
        let mut parts = Vec::new();
        for (i, (m, wi)) in self.members.iter().zip(w.iter()).enumerate() {
            if wi.is_zero() {
                continue;
            }
            parts.extend([i as u64, m.state_key(h)?, ebw_core::hash_of(&wi.token())]);
        }
        Some(ebw_core::hash_keys(&parts))
    }
}

fn normalize<P: Scalar>(w: Vec<P>) -> Option<Arc<Vec<P>>> {
    let z: P = w.iter().cloned().sum();
    if z.is_zero() {
        return None;
    }
    Some(Arc::new(w.into_iter().map(|x| x / z.clone()).collect()))
}

/// ζ, ξ and the marginal priors of a pair class.
pub struct DecoupledFactorization<P: Scalar> {
    pub zeta: Arc<MixturePolicy<P>>,
    pub xi: Arc<MixtureEnvironment<P>>,
    pub w_pol: Vec<P>,
    pub w_env: Vec<P>,
    /// Whether the joint prior equals the product of its marginals.
    pub decoupled: bool,
}

impl<P: Scalar> DecoupledFactorization<P> {
    /// ξ^ζ, which equals the product-prior mixture ρ_d.
    pub fn universe(&self) -> Result<Interaction<P>> {
        Ok(interact(
            self.zeta.clone() as Arc<dyn Policy<P>>,
            self.xi.clone() as Arc<dyn Environment<P>>,
        )?)
    }
}

/// Splits a pair class into its mixture policy ζ and mixture environment ξ.
pub fn factor_decoupled<P: Scalar>(class: &PairClass<P>) -> Result<DecoupledFactorization<P>> {
    let w_pol = class.policy_marginal();
    let w_env = class.env_marginal();
    let zeta = MixturePolicy::new(class.policies.iter().map(|p| p.1.clone()).collect(), w_pol.clone())?;
    let xi = MixtureEnvironment::new(class.envs.clone(), w_env.clone())?;
    Ok(DecoupledFactorization {
        zeta: Arc::new(zeta),
        xi: Arc::new(xi),
        w_pol,
        w_env,
        decoupled: class.is_decoupled(),
    })
}
