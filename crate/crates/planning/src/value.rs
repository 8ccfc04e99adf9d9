//! Depth-limited value recursions: on-policy V_ρ, expectimax Q*, and the k-step Q^k.

use std::collections::HashMap;

use ebw_core::{CoreError, Environment, History, Scalar, Signature, Universe};

use crate::error::Result;
use crate::task::{DiscountedTask, PlanBudget, ValueEstimate};

/// Continuation depth marker for the optimal (max over all future actions) value.
pub(crate) const OPTIMAL: usize = usize::MAX;

/// What the planner may query: a full universe, or only a percept model.
#[derive(Clone, Copy)]
pub(crate) enum Model<'a, P: Scalar> {
    Universe(&'a dyn Universe<P>),
    Environment(&'a dyn Environment<P>),
}

impl<'a, P: Scalar> Model<'a, P> {
    pub(crate) fn signature(&self) -> &Signature {
        match self {
            Model::Universe(u) => u.signature(),
            Model::Environment(e) => e.signature(),
        }
    }

    fn percepts(&self, h: &History, a: usize) -> ebw_core::Result<Vec<P>> {
        match self {
            Model::Universe(u) => u.percept_dist(h, a),
            Model::Environment(e) => e.dist(h, a),
        }
    }

    fn actions(&self, h: &History) -> Option<ebw_core::Result<Vec<P>>> {
        match self {
            Model::Universe(u) => Some(u.action_dist(h)),
            Model::Environment(_) => None,
        }
    }

    fn key(&self, h: &History) -> Option<u64> {
        match self {
            Model::Universe(u) => u.state_key(h),
            Model::Environment(e) => e.state_key(h),
        }
    }
}

/// One planning problem: a model, a task and a memo table keyed by
/// (state key, continuation level, remaining steps).
pub(crate) struct Engine<'a, P: Scalar> {
    model: Model<'a, P>,
    task: &'a DiscountedTask<P>,
    one_minus_gamma: P,
    memo: HashMap<(u64, usize, usize), P>,
    pub(crate) terminated: u64,
}

impl<'a, P: Scalar> Engine<'a, P> {
    pub(crate) fn new(model: Model<'a, P>, task: &'a DiscountedTask<P>) -> Self {
        let one_minus_gamma = P::one() - task.gamma().clone();
        Engine {
            model,
            task,
            one_minus_gamma,
            memo: HashMap::new(),
            terminated: 0,
        }
    }

    pub(crate) fn horizon(&self, h: &History, budget: &PlanBudget) -> Result<usize> {
        budget.effective(self.task.gamma().to_f64(), h.len(), self.model.signature().depth)
    }

    pub(crate) fn estimate(&self, value: P, horizon: usize) -> ValueEstimate<P> {
        ValueEstimate {
            value,
            error_bound: self.task.gamma().pow(horizon),
            horizon,
            terminated: self.terminated,
        }
    }

    /// Value at `h` over `steps` steps. Level 0 rolls the self-model (V_ρ),
    /// level k ≥ 1 is max_a Q^k, and `OPTIMAL` is the expectimax value.
    pub(crate) fn value(&mut self, h: &History, steps: usize, level: usize) -> Result<P> {
        if steps == 0 {
            return Ok(P::zero());
        }
        let key = self.model.key(h).map(|k| (k, level, steps));
        if let Some(k) = key {
            if let Some(v) = self.memo.get(&k) {
                return Ok(v.clone());
            }
        }
        let v = if level == 0 {
            self.self_value(h, steps)?
        } else {
            let qs = self.q_all(h, steps, level)?;
            qs.into_iter().fold(P::zero(), P::max_of)
        };
        if let Some(k) = key {
            self.memo.insert(k, v.clone());
        }
        Ok(v)
    }

    fn self_value(&mut self, h: &History, steps: usize) -> Result<P> {
        let dist = match self.model.actions(h) {
            Some(Ok(d)) => d,
            Some(Err(CoreError::UndefinedConditional { .. })) => {
                self.terminated += 1;
                return Ok(P::zero());
            }
            Some(Err(e)) => return Err(e.into()),
            None => return self.value(h, steps, OPTIMAL),
        };
        let mut v = P::zero();
        for (a, pa) in dist.into_iter().enumerate() {
            if pa.is_positive() {
                v = v + pa * self.q(h, a, steps, 1, true)?;
            }
        }
        Ok(v)
    }

    pub(crate) fn q_all(&mut self, h: &History, steps: usize, level: usize) -> Result<Vec<P>> {
        (0..self.model.signature().n_actions())
            .map(|a| self.q(h, a, steps, level, false))
            .collect()
    }

    /// Q at level `level`: immediate reward plus the continuation at level − 1
    /// (`OPTIMAL` stays optimal). `rollout` marks a step of V_ρ itself, whose
    /// continuation is again V_ρ.
    pub(crate) fn q(&mut self, h: &History, a: usize, steps: usize, level: usize, rollout: bool) -> Result<P> {
        let next = if rollout || level == OPTIMAL { if rollout { 0 } else { OPTIMAL } } else { level - 1 };
        let dist = self.model.percepts(h, a)?;
        let gamma = self.task.gamma().clone();
        let mut q = P::zero();
        for (e, pe) in dist.into_iter().enumerate() {
            if !pe.is_positive() {
                continue;
            }
            let mut inner = self.one_minus_gamma.clone() * self.task.reward(e).clone();
            if gamma.is_positive() && steps > 1 {
                inner = inner + gamma.clone() * self.value(&h.extended(a, e), steps - 1, next)?;
            }
            q = q + pe * inner;
        }
        Ok(q)
    }
}

/// Lowest index attaining the maximum.
pub fn argmax_lowest<P: Scalar>(xs: &[P]) -> usize {
    let mut best = 0;
    for (i, x) in xs.iter().enumerate().skip(1) {
        if *x > xs[best] {
            best = i;
        }
    }
    best
}

/// V_λ(h): (1−γ) Σ_{i<H} γ^i E_λ[r_{t+i} | h], rolling λ's own action and percept parts.
pub fn policy_value<P: Scalar>(
    lambda: &dyn Universe<P>,
    h: &History,
    task: &DiscountedTask<P>,
    budget: &PlanBudget,
) -> Result<ValueEstimate<P>> {
    let mut eng = Engine::new(Model::Universe(lambda), task);
    let steps = eng.horizon(h, budget)?;
    let v = eng.value(h, steps, 0)?;
    Ok(eng.estimate(v, steps))
}

/// Continuation used after the first step of a Q-value.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Continuation {
    /// V_ρ: the model's own action part keeps acting.
    SelfModel,
    /// V*: the best action at every later step.
    Optimal,
}

pub fn q_value<P: Scalar>(
    rho: &dyn Universe<P>,
    h: &History,
    a: usize,
    task: &DiscountedTask<P>,
    budget: &PlanBudget,
    continuation: Continuation,
) -> Result<ValueEstimate<P>> {
    let mut eng = Engine::new(Model::Universe(rho), task);
    let steps = eng.horizon(h, budget)?;
    let v = match continuation {
        Continuation::SelfModel => eng.q(h, a, steps, 1, false)?,
        Continuation::Optimal => eng.q(h, a, steps, OPTIMAL, false)?,
    };
    Ok(eng.estimate(v, steps))
}

/// Q*(h, a) for every action under a percept model.
pub fn optimal_q_values<P: Scalar>(
    env: &dyn Environment<P>,
    h: &History,
    task: &DiscountedTask<P>,
    budget: &PlanBudget,
) -> Result<Vec<ValueEstimate<P>>> {
    let mut eng = Engine::new(Model::Environment(env), task);
    let steps = eng.horizon(h, budget)?;
    let qs = eng.q_all(h, steps, OPTIMAL)?;
    Ok(qs.into_iter().map(|v| eng.estimate(v, steps)).collect())
}

/// Q^k_ρ(h, a) with terminal value V_ρ.
pub fn k_step_q<P: Scalar>(
    rho: &dyn Universe<P>,
    h: &History,
    a: usize,
    k: usize,
    task: &DiscountedTask<P>,
    budget: &PlanBudget,
) -> Result<ValueEstimate<P>> {
    Ok(k_step_q_values(rho, h, k, task, budget)?.swap_remove(a))
}

/// Q^k_ρ(h, ·) for every action.
pub fn k_step_q_values<P: Scalar>(
    rho: &dyn Universe<P>,
    h: &History,
    k: usize,
    task: &DiscountedTask<P>,
    budget: &PlanBudget,
) -> Result<Vec<ValueEstimate<P>>> {
    if k == 0 {
        return Err(crate::error::PlanningError::InvalidBudget("k must be at least 1".into()));
    }
    let mut eng = Engine::new(Model::Universe(rho), task);
    let steps = eng.horizon(h, budget)?;
    let qs = eng.q_all(h, steps, k)?;
    Ok(qs.into_iter().map(|v| eng.estimate(v, steps)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Arc;

    use ebw_core::{interact, q, Alphabet, FnEnvironment, FnPolicy, Rational, Signature};

    fn sig(depth: usize) -> Signature {
        Signature::new(
            Alphabet::actions(&["a0", "a1"]).unwrap(),
            Alphabet::percepts(&["lo", "hi"]).unwrap(),
            depth,
        )
        .unwrap()
    }

    #[test]
    fn constant_reward_geometric_series() {
        let u = interact(
            Arc::new(FnPolicy::<Rational>::uniform(sig(6))),
            Arc::new(FnEnvironment::deterministic(sig(6), |_, _| 1)),
        )
        .unwrap();
        let task = DiscountedTask::new(q(1, 2), vec![q(0, 1), q(3, 5)]).unwrap();
        let v = policy_value(&u, &History::empty(), &task, &PlanBudget::horizon(5).unwrap()).unwrap();
        assert_eq!(v.value, q(3, 5) * (q(1, 1) - q(1, 32)));
        assert_eq!(v.error_bound, q(1, 32));
    }

    #[test]
    fn zero_discount_is_immediate_reward() {
        let u = interact(
            Arc::new(FnPolicy::<Rational>::constant(sig(3), vec![q(1, 4), q(3, 4)])),
            Arc::new(FnEnvironment::new(sig(3), |_, a| if a == 0 { vec![q(1, 1), q(0, 1)] } else { vec![q(0, 1), q(1, 1)] })),
        )
        .unwrap();
        let task = DiscountedTask::new(q(0, 1), vec![q(0, 1), q(1, 1)]).unwrap();
        let b = PlanBudget::tolerance(1e-3).unwrap();
        assert_eq!(policy_value(&u, &History::empty(), &task, &b).unwrap().value, q(3, 4));
        assert_eq!(
            q_value(&u, &History::empty(), 1, &task, &b, Continuation::Optimal).unwrap().value,
            q(1, 1)
        );
    }

    /// Percepts always defined, actions strict: off-path self-model is undefined.
    struct StrictSelf(ebw_core::Interaction<Rational>);

    impl Universe<Rational> for StrictSelf {
        fn signature(&self) -> &Signature {
            self.0.signature()
        }
        fn mass(&self, h: &History) -> ebw_core::Result<Rational> {
            self.0.mass(h)
        }
        fn mass_action(&self, h: &History, a: usize) -> ebw_core::Result<Rational> {
            self.0.mass_action(h, a)
        }
        fn action_dist(&self, h: &History) -> ebw_core::Result<Vec<Rational>> {
            self.0.action_dist(h)
        }
        fn percept_dist(&self, h: &History, a: usize) -> ebw_core::Result<Vec<Rational>> {
            self.0.environment().dist(h, a)
        }
    }

    #[test]
    fn undefined_self_model_terminates_branch() {
        let u = StrictSelf(
            interact(
                Arc::new(FnPolicy::<Rational>::deterministic(sig(3), |_| 0)),
                Arc::new(FnEnvironment::deterministic(sig(3), |_, _| 1)),
            )
            .unwrap(),
        );
        let task = DiscountedTask::new(q(1, 2), vec![q(0, 1), q(1, 1)]).unwrap();
        let b = PlanBudget::horizon(2).unwrap();
        let v = q_value(&u, &History::empty(), 1, &task, &b, Continuation::SelfModel).unwrap();
        assert_eq!(v.value, q(1, 2));
        assert_eq!(v.terminated, 1);
        let on_path = q_value(&u, &History::empty(), 0, &task, &b, Continuation::SelfModel).unwrap();
        assert_eq!(on_path.value, q(3, 4));
        assert_eq!(on_path.terminated, 0);
    }

    #[test]
    fn ties_pick_lowest() {
        assert_eq!(argmax_lowest(&[q(1, 2), q(1, 2)]), 0);
        assert_eq!(argmax_lowest(&[0.1, 0.3, 0.3]), 1);
    }
}
