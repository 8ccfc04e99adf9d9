//! Posterior weights over a hypothesis class, updated on actions and percepts.

use ebw_core::{History, Scalar};
use serde::Serialize;

use crate::class::{HypothesisClass, Prior};
use crate::error::{BayesError, Result};

/// Posterior w(λ | h) or w(λ | h a); weights sum to one.
#[derive(Clone, Debug, PartialEq)]
pub struct BeliefState<P: Scalar> {
    weights: Vec<P>,
    history: History,
    dangling: Option<usize>,
}

impl<P: Scalar> BeliefState<P> {
    pub fn from_prior(prior: &Prior<P>) -> Self {
        BeliefState {
            weights: prior.normalized(),
            history: History::empty(),
            dangling: None,
        }
    }

    pub fn from_parts(weights: Vec<P>, history: History, dangling: Option<usize>) -> Self {
        BeliefState {
            weights,
            history,
            dangling,
        }
    }

    pub fn weights(&self) -> &[P] {
        &self.weights
    }

    pub fn history(&self) -> &History {
        &self.history
    }

    pub fn dangling(&self) -> Option<usize> {
        self.dangling
    }

    /// Weighted average of member rows, skipping members with zero weight.
    fn mix(&self, rows: impl Fn(usize) -> ebw_core::Result<Vec<P>>, width: usize) -> Result<Vec<P>> {
        let mut out = vec![P::zero(); width];
        for (i, w) in self.weights.iter().enumerate() {
            if w.is_zero() {
                continue;
            }
            for (o, x) in out.iter_mut().zip(rows(i)?) {
                *o = o.clone() + w.clone() * x;
            }
        }
        Ok(out)
    }

    fn reweighted(&self, likelihood: &[P]) -> Option<Vec<P>> {
        let joint: Vec<P> = self
            .weights
            .iter()
            .zip(likelihood)
            .map(|(w, l)| w.clone() * l.clone())
            .collect();
        let z: P = joint.iter().cloned().sum();
        if z.is_zero() {
            return None;
        }
        Some(joint.into_iter().map(|x| x / z.clone()).collect())
    }
}

/// ρ(·|h) when no action is pending, ρ(·|h a) otherwise.
pub fn predict<P: Scalar>(class: &HypothesisClass<P>, b: &BeliefState<P>) -> Result<Vec<P>> {
    let sig = class.signature();
    match b.dangling {
        None => b.mix(|i| class.member(i).action_dist(&b.history), sig.n_actions()),
        Some(a) => b.mix(|i| class.member(i).percept_dist(&b.history, a), sig.n_percepts()),
    }
}

/// Likelihood of `a` for each member with positive weight (zero elsewhere).
fn action_likelihoods<P: Scalar>(class: &HypothesisClass<P>, b: &BeliefState<P>, a: usize) -> Result<Vec<P>> {
    let mut out = Vec::with_capacity(class.len());
    for (i, w) in b.weights.iter().enumerate() {
        out.push(if w.is_zero() {
            P::zero()
        } else {
            class.member(i).action_dist(&b.history)?[a].clone()
        });
    }
    Ok(out)
}

fn percept_likelihoods<P: Scalar>(
    class: &HypothesisClass<P>,
    b: &BeliefState<P>,
    a: usize,
    e: usize,
) -> Result<Vec<P>> {
    let mut out = Vec::with_capacity(class.len());
    for (i, w) in b.weights.iter().enumerate() {
        out.push(if w.is_zero() {
            P::zero()
        } else {
            class.member(i).percept_dist(&b.history, a)?[e].clone()
        });
    }
    Ok(out)
}

/// w(λ | h a) = w(λ | h) λ(a|h) / ρ(a|h).
pub fn update_on_action<P: Scalar>(class: &HypothesisClass<P>, b: &BeliefState<P>, a: usize) -> Result<BeliefState<P>> {
    if b.dangling.is_some() {
        return Err(BayesError::InvalidClass("action update with an action already pending".into()));
    }
    class.signature().actions.check(a)?;
    let l = action_likelihoods(class, b, a)?;
    let weights = b.reweighted(&l).ok_or_else(|| BayesError::ZeroPredictiveMass {
        history: b.history.clone(),
        action: Some(a),
        percept: None,
    })?;
    Ok(BeliefState {
        weights,
        history: b.history.clone(),
        dangling: Some(a),
    })
}

/// w(λ | h a e) = w(λ | h a) λ(e|h a) / ρ(e|h a).
pub fn update_on_percept<P: Scalar>(class: &HypothesisClass<P>, b: &BeliefState<P>, e: usize) -> Result<BeliefState<P>> {
    let a = b
        .dangling
        .ok_or_else(|| BayesError::InvalidClass("percept update without a pending action".into()))?;
    class.signature().percepts.check(e)?;
    let l = percept_likelihoods(class, b, a, e)?;
    let weights = b.reweighted(&l).ok_or_else(|| BayesError::ZeroPredictiveMass {
        history: b.history.clone(),
        action: Some(a),
        percept: Some(e),
    })?;
    Ok(BeliefState {
        weights,
        history: b.history.extended(a, e),
        dangling: None,
    })
}

/// Carries the weights across a node where the realized symbol had zero
/// predictive mass (the limit of a vanishing, policy-independent tremble).
pub(crate) fn carry_action<P: Scalar>(b: &BeliefState<P>, a: usize) -> BeliefState<P> {
    BeliefState {
        weights: b.weights.clone(),
        history: b.history.clone(),
        dangling: Some(a),
    }
}

pub(crate) fn carry_percept<P: Scalar>(b: &BeliefState<P>, e: usize) -> BeliefState<P> {
    let a = b.dangling.expect("pending action");
    BeliefState {
        weights: b.weights.clone(),
        history: b.history.extended(a, e),
        dangling: None,
    }
}

/// Closed-form posterior w(λ)λ(h)/ρ(h); `None` when ρ(h) = 0.
pub fn closed_form_posterior<P: Scalar>(
    class: &HypothesisClass<P>,
    prior: &Prior<P>,
    h: &History,
) -> Result<Option<Vec<P>>> {
    let mut joint = Vec::with_capacity(class.len());
    for (u, w) in class.members().iter().zip(prior.weights()) {
        joint.push(w.clone() * u.mass(h)?);
    }
    let z: P = joint.iter().cloned().sum();
    if z.is_zero() {
        return Ok(None);
    }
    Ok(Some(joint.into_iter().map(|x| x / z.clone()).collect()))
}

/// One line of an exported belief trajectory.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BeliefRecord {
    pub step: usize,
    /// The symbol just conditioned on: an action label or a percept label.
    pub token: String,
    pub weights: Vec<String>,
}

/// Runs the dual updates along `h`, recording the posterior after every symbol.
pub fn belief_trajectory<P: Scalar>(
    class: &HypothesisClass<P>,
    prior: &Prior<P>,
    h: &History,
) -> Result<Vec<BeliefRecord>> {
    let sig = class.signature();
    let mut b = BeliefState::from_prior(prior);
    let record = |step: usize, token: String, b: &BeliefState<P>| BeliefRecord {
        step,
        token,
        weights: b.weights.iter().map(|w| w.token()).collect(),
    };
    let mut out = vec![record(0, ebw_core::table::EMPTY_TOKEN.to_string(), &b)];
    for (t, &(a, e)) in h.turns().iter().enumerate() {
        b = update_on_action(class, &b, a)?;
        out.push(record(t + 1, sig.actions.label(a).to_string(), &b));
        b = update_on_percept(class, &b, e)?;
        out.push(record(t + 1, sig.percepts.label(e).to_string(), &b));
    }
    Ok(out)
}

/// Line-delimited JSON with a schema header line.
pub fn trajectory_to_jsonl(class_labels: &[String], records: &[BeliefRecord]) -> String {
    let header = serde_json::json!({ "schema": "ebw-beliefs/1", "universes": class_labels });
    let mut out = header.to_string();
    out.push('\n');
    for r in records {
        out.push_str(&serde_json::to_string(r).expect("records serialize"));
        out.push('\n');
    }
    out
}
