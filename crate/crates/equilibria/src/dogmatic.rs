//! Dogmatic beliefs: a mixture that predicts minimal reward forever after any
//! deviation from a deterministic policy, making that policy a best response.

use std::sync::Arc;

use ebw_bayes::{HypothesisClass, MixtureUniverse, Prior};
use ebw_core::{
    interact, CoreError, Environment, FnEnvironment, FnPolicy, History, Policy, Scalar, Signature, Universe,
};
use ebw_planning::{DiscountedTask, PlanBudget};

use crate::error::{EquilibriumError, Result};
use crate::sequential::best_response_gap;
use crate::verdict::{Tolerances, Verdict, Witness};

/// λ_dogmatic: uniform until the first deviation from π, then uniform
/// over the minimal-reward percepts ℰ₀ from the deviating step on.
pub struct DogmaticUniverse<P: Scalar> {
    pi: Arc<dyn Policy<P>>,
    zero_percepts: Vec<usize>,
}

impl<P: Scalar> DogmaticUniverse<P> {
    pub fn new(pi: Arc<dyn Policy<P>>, task: &DiscountedTask<P>) -> Result<Self> {
        let rewards = task.rewards();
        if rewards.len() != pi.signature().n_percepts() {
            return Err(EquilibriumError::InvalidInput("task and policy percepts differ".into()));
        }
        let min = rewards.iter().cloned().fold(rewards[0].clone(), P::min_of);
        let zero_percepts = (0..rewards.len()).filter(|&e| rewards[e] == min).collect();
        Ok(DogmaticUniverse { pi, zero_percepts })
    }

    fn prescribed(&self, h: &History) -> ebw_core::Result<usize> {
        let d = self.pi.dist(h)?;
        match d.iter().position(|p| *p == P::one()) {
            Some(a) => Ok(a),
            None => Err(CoreError::InvalidDistribution(format!("policy is not deterministic at {}", h))),
        }
    }

    /// Whether some action of `h` deviates from π.
    fn deviated(&self, h: &History) -> ebw_core::Result<bool> {
        let mut cur = History::empty();
        for &(a, e) in h.turns() {
            if a != self.prescribed(&cur)? {
                return Ok(true);
            }
            cur.push(a, e);
        }
        Ok(false)
    }
}

impl<P: Scalar> Universe<P> for DogmaticUniverse<P> {
    fn signature(&self) -> &Signature {
        self.pi.signature()
    }

    fn mass(&self, h: &History) -> ebw_core::Result<P> {
        self.signature().check_len(h.len())?;
        let mut m = P::one();
        let mut cur = History::empty();
        for &(a, e) in h.turns() {
            m = m * self.action_dist(&cur)?[a].clone() * self.percept_dist(&cur, a)?[e].clone();
            if m.is_zero() {
                break;
            }
            cur.push(a, e);
        }
        Ok(m)
    }

    fn mass_action(&self, h: &History, a: usize) -> ebw_core::Result<P> {
        Ok(self.mass(h)? * self.action_dist(h)?[a].clone())
    }

    fn action_dist(&self, h: &History) -> ebw_core::Result<Vec<P>> {
        self.signature().check_extend(h.len())?;
        Ok(ebw_core::policy::uniform(self.signature().n_actions()))
    }

    fn percept_dist(&self, h: &History, a: usize) -> ebw_core::Result<Vec<P>> {
        self.signature().check_extend(h.len())?;
        let n = self.signature().n_percepts();
        if self.deviated(h)? || a != self.prescribed(h)? {
            let w = P::one() / P::from_usize(self.zero_percepts.len());
            let mut d = vec![P::zero(); n];
            for &e in &self.zero_percepts {
                d[e] = w.clone();
            }
            Ok(d)
        } else {
            Ok(ebw_core::policy::uniform(n))
        }
    }
}

/// ρ = (1−ε−ε²)·μ^π + ε·λ_dogmatic + ε²·λ_random, with strict conditionals.
pub fn dogmatic_mixture<P: Scalar>(
    pi: Arc<dyn Policy<P>>,
    mu: Arc<dyn Environment<P>>,
    task: &DiscountedTask<P>,
    eps: &P,
) -> Result<MixtureUniverse<P>> {
    let eps2 = eps.clone() * eps.clone();
    let main = P::one() - eps.clone() - eps2.clone();
    if *eps < P::zero() || main < P::zero() {
        return Err(EquilibriumError::InvalidInput(format!("mixture weight ε = {} out of range", eps)));
    }
    let sig = pi.signature().clone();
    let truth: Arc<dyn Universe<P>> = Arc::new(interact(pi.clone(), mu)?);
    let dogmatic: Arc<dyn Universe<P>> = Arc::new(DogmaticUniverse::new(pi, task)?);
    let uniform_pi: Arc<dyn Policy<P>> = Arc::new(FnPolicy::uniform(sig.clone()));
    let uniform_env: Arc<dyn Environment<P>> = Arc::new(FnEnvironment::uniform(sig));
    let random: Arc<dyn Universe<P>> = Arc::new(interact(uniform_pi, uniform_env)?);
    let class = HypothesisClass::new(vec![
        ("truth".to_string(), truth),
        ("dogmatic".to_string(), dogmatic),
        ("random".to_string(), random),
    ])?;
    Ok(MixtureUniverse::new(class, Prior::new(vec![main, eps.clone(), eps2])?)?)
}

/// π is an embedded best response to its dogmatic mixture within γ^H + 5ε.
pub fn dogmatic_best_response_check<P: Scalar>(
    pi: Arc<dyn Policy<P>>,
    mu: Arc<dyn Environment<P>>,
    eps_mix: &P,
    task: &DiscountedTask<P>,
    budget: &PlanBudget,
) -> Result<Verdict> {
    let rho: Arc<dyn Universe<P>> = Arc::new(dogmatic_mixture(pi.clone(), mu, task, eps_mix)?);
    let g = best_response_gap(&pi, &rho, &History::empty(), task, budget)?;
    let allowance = P::from_usize(5) * eps_mix.clone();
    let gap = g.gap();
    let mut witnesses = Vec::new();
    if gap > g.planning_slack.clone() + allowance.clone() {
        witnesses.push(Witness::deviation(
            0,
            ebw_core::table::EMPTY_TOKEN,
            rho.signature().actions.label(g.best_action),
            &gap,
        ));
    }
    let tol = Tolerances {
        eps: Some(eps_mix.token()),
        delta: Some(allowance.token()),
        planning_slack: Some(g.planning_slack.token()),
        scan_depth: None,
    };
    Ok(Verdict::new("dogmatic-best-response", witnesses, tol))
}
