//! Action selection: embedded best response, k-step and approximate planners.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use ebw_core::{policy::point_mass, Environment, History, PerceptPart, Policy, Scalar, Signature, Universe};

use crate::error::{PlanningError, Result};
use crate::task::{DiscountedTask, PlanBudget};
use crate::value::{argmax_lowest, Engine, Model, OPTIMAL};

/// A chosen action with the Q-values it was chosen from.
#[derive(Clone, Debug, PartialEq)]
pub struct Decision<P: Scalar> {
    pub action: usize,
    pub q_values: Vec<P>,
    pub error_bound: P,
    pub horizon: usize,
    pub terminated: u64,
}

impl<P: Scalar> Decision<P> {
    pub fn chosen_q(&self) -> &P {
        &self.q_values[self.action]
    }
}

fn decide<P: Scalar>(
    model: Model<'_, P>,
    h: &History,
    level: usize,
    task: &DiscountedTask<P>,
    budget: &PlanBudget,
    pick: impl FnOnce(&[P]) -> usize,
) -> Result<Decision<P>> {
    let mut eng = Engine::new(model, task);
    let steps = eng.horizon(h, budget)?;
    let q_values = eng.q_all(h, steps, level)?;
    let est = eng.estimate(P::zero(), steps);
    Ok(Decision {
        action: pick(&q_values),
        q_values,
        error_bound: est.error_bound,
        horizon: steps,
        terminated: est.terminated,
    })
}

/// Optimal planning against ρ(e | h a) only; the self-model is ignored.
pub fn embedded_best_response<P: Scalar>(
    rho: Arc<dyn Universe<P>>,
    h: &History,
    task: &DiscountedTask<P>,
    budget: &PlanBudget,
) -> Result<Decision<P>> {
    let env = PerceptPart(rho);
    best_response(&env, h, task, budget)
}

/// Optimal planning against an environment (e.g. a decoupled mixture ξ).
pub fn best_response<P: Scalar>(
    env: &dyn Environment<P>,
    h: &History,
    task: &DiscountedTask<P>,
    budget: &PlanBudget,
) -> Result<Decision<P>> {
    decide(Model::Environment(env), h, OPTIMAL, task, budget, argmax_lowest)
}

fn check_k(k: usize) -> Result<()> {
    if k == 0 {
        return Err(PlanningError::InvalidBudget("k must be at least 1".into()));
    }
    Ok(())
}

/// argmax_a Q^k_ρ(h, a), ties to the lowest index.
pub fn k_step_action<P: Scalar>(
    rho: &dyn Universe<P>,
    h: &History,
    k: usize,
    task: &DiscountedTask<P>,
    budget: &PlanBudget,
) -> Result<Decision<P>> {
    check_k(k)?;
    decide(Model::Universe(rho), h, k, task, budget, argmax_lowest)
}

/// The lowest-index action whose Q^{k_t} is within ε_t of the maximum.
pub fn approx_agent_step<P: Scalar>(
    rho: &dyn Universe<P>,
    h: &History,
    k_t: usize,
    eps_t: &P,
    task: &DiscountedTask<P>,
    budget: &PlanBudget,
) -> Result<Decision<P>> {
    check_k(k_t)?;
    decide(Model::Universe(rho), h, k_t, task, budget, |qs| {
        let best = qs[argmax_lowest(qs)].clone();
        qs.iter()
            .position(|x| x.clone() + eps_t.clone() >= best)
            .expect("the maximum qualifies")
    })
}

/// The deterministic k-step planner as a policy, for evaluating V_{ρ^π}.
pub struct KStepPolicy<P: Scalar> {
    rho: Arc<dyn Universe<P>>,
    k: usize,
    task: DiscountedTask<P>,
    budget: PlanBudget,
    cache: Mutex<HashMap<History, usize>>,
}

impl<P: Scalar> KStepPolicy<P> {
    pub fn new(rho: Arc<dyn Universe<P>>, k: usize, task: DiscountedTask<P>, budget: PlanBudget) -> Result<Self> {
        check_k(k)?;
        Ok(KStepPolicy {
            rho,
            k,
            task,
            budget,
            cache: Mutex::new(HashMap::new()),
        })
    }
}

impl<P: Scalar> Policy<P> for KStepPolicy<P> {
    fn signature(&self) -> &Signature {
        self.rho.signature()
    }

    fn dist(&self, h: &History) -> ebw_core::Result<Vec<P>> {
        let n = self.rho.signature().n_actions();
        if let Some(&a) = self.cache.lock().expect("cache poisoned").get(h) {
            return Ok(point_mass(n, a));
        }
        let a = match k_step_action(self.rho.as_ref(), h, self.k, &self.task, &self.budget) {
            Ok(d) => d.action,
            Err(PlanningError::Core(e)) => return Err(e),
            Err(e) => return Err(ebw_core::CoreError::InvalidDistribution(e.to_string())),
        };
        self.cache.lock().expect("cache poisoned").insert(h.clone(), a);
        Ok(point_mass(n, a))
    }
}
