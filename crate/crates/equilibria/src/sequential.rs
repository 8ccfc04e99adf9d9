//! Embedded equilibrium checks on sequential universes: ε-SEE, SEE, EE,
//! ε-SCEE and (ε,δ)-SCEE.
//!
//! A best response is certified when V*_ρ(h) − V_{ρ^π}(h) ≤ γ^H + δ_br, where
//! both values are planned to the budget's horizon H.

use std::collections::BTreeMap;
use std::sync::Arc;

use ebw_core::{
    interact, total_variation_k, Completed, Environment, History, PerceptPart, Policy, Scalar, Universe,
};
use ebw_planning::{argmax_lowest, optimal_q_values, policy_value, DiscountedTask, PlanBudget};

use crate::error::{EquilibriumError, Result};
use crate::verdict::{Tolerances, Verdict, Witness};

/// One player's policy, subjective model ρ^i and ground truth (μ^i)^{π^i},
/// checked at the personal history `at`.
#[derive(Clone)]
pub struct EmbeddedPlayer<P: Scalar> {
    pub policy: Arc<dyn Policy<P>>,
    pub model: Arc<dyn Universe<P>>,
    pub truth: Arc<dyn Universe<P>>,
    pub task: DiscountedTask<P>,
    pub at: History,
}

/// Slack and scan settings shared by the sequential checkers.
#[derive(Clone, Debug, PartialEq)]
pub struct CheckOptions<P: Scalar> {
    /// Best-response tolerance added to the planner's γ^H.
    pub delta_br: P,
    /// Depth k of the belief distance D_k.
    pub k_scan: usize,
}

impl<P: Scalar> Default for CheckOptions<P> {
    fn default() -> Self {
        CheckOptions {
            delta_br: if P::EXACT { P::from_ratio(1, 1_000_000_000) } else { P::from_f64(1e-6) },
            k_scan: 3,
        }
    }
}

impl<P: Scalar> CheckOptions<P> {
    pub fn exact() -> Self {
        CheckOptions {
            delta_br: P::zero(),
            k_scan: 3,
        }
    }
}

/// V*_ρ(h) against V_{ρ^π}(h) under the percept part of a model.
#[derive(Clone, Debug, PartialEq)]
pub struct BestResponseGap<P: Scalar> {
    pub policy_value: P,
    pub optimal_value: P,
    pub best_action: usize,
    /// γ^H of the planning horizon used.
    pub planning_slack: P,
}

impl<P: Scalar> BestResponseGap<P> {
    pub fn gap(&self) -> P {
        self.optimal_value.clone() - self.policy_value.clone()
    }
}

pub fn best_response_gap<P: Scalar>(
    policy: &Arc<dyn Policy<P>>,
    model: &Arc<dyn Universe<P>>,
    h: &History,
    task: &DiscountedTask<P>,
    budget: &PlanBudget,
) -> Result<BestResponseGap<P>> {
    let env: Arc<dyn Environment<P>> = Arc::new(PerceptPart(model.clone()));
    let rho_pi = interact(policy.clone(), env.clone())?.with_factor_completion();
    let v = policy_value(&rho_pi, h, task, budget)?;
    let qs = optimal_q_values(env.as_ref(), h, task, budget)?;
    let values: Vec<P> = qs.iter().map(|e| e.value.clone()).collect();
    let best = argmax_lowest(&values);
    Ok(BestResponseGap {
        policy_value: v.value,
        optimal_value: values[best].clone(),
        best_action: best,
        planning_slack: P::max_of(v.error_bound, qs[best].error_bound.clone()),
    })
}

fn remaining<P: Scalar>(u: &dyn Universe<P>, h: &History) -> usize {
    u.signature().depth.saturating_sub(h.len())
}

struct Collector<P: Scalar> {
    witnesses: Vec<Witness>,
    slack: P,
}

impl<P: Scalar> Collector<P> {
    fn new() -> Self {
        Collector {
            witnesses: Vec::new(),
            slack: P::zero(),
        }
    }

    fn best_response(
        &mut self,
        i: usize,
        policy: &Arc<dyn Policy<P>>,
        model: &Arc<dyn Universe<P>>,
        h: &History,
        task: &DiscountedTask<P>,
        budget: &PlanBudget,
        delta: &P,
    ) -> Result<()> {
        let g = best_response_gap(policy, model, h, task, budget)?;
        let gap = g.gap();
        if gap > g.planning_slack.clone() + delta.clone() {
            let sig = model.signature();
            self.witnesses.push(Witness::deviation(
                i,
                ebw_core::table::history_key(h, sig),
                sig.actions.label(g.best_action),
                &gap,
            ));
        }
        self.slack = P::max_of(self.slack.clone(), g.planning_slack);
        Ok(())
    }

    fn tolerances(&self, eps: Option<&P>, delta: &P, k: Option<usize>) -> Tolerances {
        Tolerances {
            eps: eps.map(|e| e.token()),
            delta: Some(delta.token()),
            planning_slack: Some(self.slack.token()),
            scan_depth: k,
        }
    }
}

/// ε-SEE: subjective best response, and D_k(ρ^i, (μ^i)^{π^i} | h) ≤ ε.
pub fn check_epsilon_see<P: Scalar>(
    players: &[EmbeddedPlayer<P>],
    eps: &P,
    budget: &PlanBudget,
    opts: &CheckOptions<P>,
) -> Result<Verdict> {
    let mut c = Collector::new();
    for (i, p) in players.iter().enumerate() {
        c.best_response(i, &p.policy, &p.model, &p.at, &p.task, budget, &opts.delta_br)?;
        let k = opts.k_scan.min(remaining(p.model.as_ref(), &p.at));
        if k > 0 {
            let d = total_variation_k(p.model.as_ref(), p.truth.as_ref(), &p.at, k)?;
            if d > *eps {
                let key = ebw_core::table::history_key(&p.at, p.model.signature());
                c.witnesses.push(Witness::belief(i, key, &d));
            }
        }
    }
    let tol = c.tolerances(Some(eps), &opts.delta_br, Some(opts.k_scan));
    Ok(Verdict::new("epsilon-see", c.witnesses, tol))
}

/// SEE: subjective best response against the completed model, and the model
/// equal to the ground truth on every continuation up to the scan depth.
pub fn check_see<P: Scalar>(players: &[EmbeddedPlayer<P>], budget: &PlanBudget, opts: &CheckOptions<P>) -> Result<Verdict> {
    let mut c = Collector::new();
    for (i, p) in players.iter().enumerate() {
        c.best_response(i, &p.policy, &p.model, &p.at, &p.task, budget, &opts.delta_br)?;
        let k = opts.k_scan.min(remaining(p.model.as_ref(), &p.at));
        if k > 0 {
            let d = total_variation_k(p.model.as_ref(), p.truth.as_ref(), &p.at, k)?;
            let contradicted = if P::EXACT { d.is_positive() } else { d > opts.delta_br };
            if contradicted {
                let key = ebw_core::table::history_key(&p.at, p.model.signature());
                c.witnesses.push(Witness::belief(i, key, &d));
            }
        }
    }
    let tol = c.tolerances(None, &opts.delta_br, Some(opts.k_scan));
    Ok(Verdict::new("see", c.witnesses, tol))
}

/// A player for the EE check: the ground truth υ^i and a completion q
/// answering wherever υ^i(h, a) = 0.
#[derive(Clone)]
pub struct EePlayer<P: Scalar> {
    pub policy: Arc<dyn Policy<P>>,
    pub truth: Arc<dyn Universe<P>>,
    pub completion: Arc<dyn Universe<P>>,
    pub task: DiscountedTask<P>,
    pub at: History,
}

impl<P: Scalar> EePlayer<P> {
    /// υ^i completed by q.
    pub fn completed_truth(&self) -> Result<Arc<dyn Universe<P>>> {
        Ok(Arc::new(Completed::new(self.truth.clone(), self.completion.clone())?))
    }

    /// The SEE player with ρ^i := the completed ground truth.
    pub fn as_see_player(&self) -> Result<EmbeddedPlayer<P>> {
        Ok(EmbeddedPlayer {
            policy: self.policy.clone(),
            model: self.completed_truth()?,
            truth: self.truth.clone(),
            task: self.task.clone(),
            at: self.at.clone(),
        })
    }
}

/// EE (ε-EE for δ_br > 0): best response against the q-completed ground truth.
pub fn check_ee<P: Scalar>(players: &[EePlayer<P>], budget: &PlanBudget, opts: &CheckOptions<P>) -> Result<Verdict> {
    let mut c = Collector::new();
    for (i, p) in players.iter().enumerate() {
        let model = p.completed_truth()?;
        c.best_response(i, &p.policy, &model, &p.at, &p.task, budget, &opts.delta_br)?;
    }
    let tol = c.tolerances(None, &opts.delta_br, None);
    Ok(Verdict::new("ee", c.witnesses, tol))
}

/// Joint messages (one personal history per player) with their probabilities.
#[derive(Clone, Debug, PartialEq)]
pub struct HistoryDevice<P: Scalar> {
    messages: Vec<(Vec<History>, P)>,
}

impl<P: Scalar> HistoryDevice<P> {
    pub fn new(messages: Vec<(Vec<History>, P)>) -> Result<Self> {
        let n = messages.first().map(|m| m.0.len()).unwrap_or(0);
        if n == 0 || messages.iter().any(|m| m.0.len() != n) {
            return Err(EquilibriumError::InvalidDevice("every message needs one history per player".into()));
        }
        let probs: Vec<P> = messages.iter().map(|m| m.1.clone()).collect();
        ebw_core::policy::check_dist(&probs, true, &"history device")
            .map_err(|e| EquilibriumError::InvalidDevice(e.to_string()))?;
        Ok(HistoryDevice { messages })
    }

    pub fn messages(&self) -> &[(Vec<History>, P)] {
        &self.messages
    }

    /// Player i's messages with their marginal probabilities, in a fixed order.
    pub fn marginal(&self, i: usize) -> Vec<(History, P)> {
        let mut m: BTreeMap<Vec<(usize, usize)>, (History, P)> = BTreeMap::new();
        for (hs, p) in &self.messages {
            let e = m.entry(hs[i].turns().to_vec()).or_insert_with(|| (hs[i].clone(), P::zero()));
            e.1 = e.1.clone() + p.clone();
        }
        m.into_values().filter(|(_, p)| p.is_positive()).collect()
    }
}

fn check_scee<P: Scalar>(
    concept: &str,
    players: &[EmbeddedPlayer<P>],
    device: &HistoryDevice<P>,
    eps: &P,
    delta: &P,
    budget: &PlanBudget,
    k_scan: usize,
) -> Result<Verdict> {
    if device.messages()[0].0.len() != players.len() {
        return Err(EquilibriumError::InvalidDevice("device and player counts differ".into()));
    }
    let mut c = Collector::new();
    for (i, p) in players.iter().enumerate() {
        let mut bad_mass = P::zero();
        let mut worst: Option<(History, P)> = None;
        for (m, pm) in device.marginal(i) {
            c.best_response(i, &p.policy, &p.model, &m, &p.task, budget, delta)?;
            let k = k_scan.min(remaining(p.model.as_ref(), &m));
            if k == 0 {
                continue;
            }
            let d = total_variation_k(p.model.as_ref(), p.truth.as_ref(), &m, k)?;
            if d > *eps {
                bad_mass = bad_mass + pm;
                if worst.as_ref().map_or(true, |w| d > w.1) {
                    worst = Some((m.clone(), d));
                }
            }
        }
        if bad_mass > *eps {
            let (m, d) = worst.expect("positive bad mass has a message");
            let key = ebw_core::table::history_key(&m, p.model.signature());
            c.witnesses.push(Witness::belief(i, key, &d));
        }
    }
    let tol = c.tolerances(Some(eps), delta, Some(k_scan));
    Ok(Verdict::new(concept, c.witnesses, tol))
}

/// ε-SCEE: best response at every message, and beliefs ε-close on messages of
/// total probability at least 1 − ε. The device's messages replace `at`.
pub fn check_eps_scee<P: Scalar>(
    players: &[EmbeddedPlayer<P>],
    device: &HistoryDevice<P>,
    eps: &P,
    budget: &PlanBudget,
    opts: &CheckOptions<P>,
) -> Result<Verdict> {
    check_scee("epsilon-scee", players, device, eps, &opts.delta_br, budget, opts.k_scan)
}

/// (ε,δ)-SCEE: as ε-SCEE with δ-best responses.
pub fn check_eps_delta_scee<P: Scalar>(
    players: &[EmbeddedPlayer<P>],
    device: &HistoryDevice<P>,
    eps: &P,
    delta: &P,
    budget: &PlanBudget,
    opts: &CheckOptions<P>,
) -> Result<Verdict> {
    check_scee("epsilon-delta-scee", players, device, eps, delta, budget, opts.k_scan)
}
