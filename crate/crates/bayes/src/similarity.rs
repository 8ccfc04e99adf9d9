//! Structural similarity between the policy and environment factors of a prior.

use ebw_core::{History, Scalar};

use crate::decoupled::PairClass;
use crate::error::{BayesError, Result};
use crate::loss::LogValue;

/// Errors unless every policy and environment in the class puts positive
/// mass on every symbol at every history shorter than `depth`.
pub fn check_fully_supported<P: Scalar>(class: &PairClass<P>, depth: usize) -> Result<()> {
    let sig = class.signature();
    let depth = depth.min(sig.depth);
    if depth == 0 {
        return Ok(());
    }
    for h in History::all_up_to(depth - 1, sig.n_actions(), sig.n_percepts()) {
        for (label, p) in class.policies() {
            if p.dist(&h)?.iter().any(|x| !x.is_positive()) {
                return Err(BayesError::NotFullySupported {
                    label: label.clone(),
                    history: h.to_string(),
                });
            }
        }
        for (label, e) in class.environments() {
            for a in 0..sig.n_actions() {
                if e.dist(&h, a)?.iter().any(|x| !x.is_positive()) {
                    return Err(BayesError::NotFullySupported {
                        label: label.clone(),
                        history: format!("{} then {}", h, a),
                    });
                }
            }
        }
    }
    Ok(())
}

/// S(λ, w) = ln w(λ) / (w(π) w(ν)) for the pair (i, j), weights normalized.
pub fn structural_similarity<P: Scalar>(class: &PairClass<P>, i: usize, j: usize, depth: usize) -> Result<LogValue> {
    check_fully_supported(class, depth)?;
    pointwise(class, i, j)
}

fn pointwise<P: Scalar>(class: &PairClass<P>, i: usize, j: usize) -> Result<LogValue> {
    let w = class.weights()[i][j].clone();
    if !w.is_positive() {
        return Err(BayesError::InvalidPrior(format!("pair ({}, {}) has zero weight", i, j)));
    }
    let t = class.total();
    let wp = class.policy_marginal()[i].clone();
    let we = class.env_marginal()[j].clone();
    let mut v = LogValue::zero::<P>();
    v.add_term(&P::one(), &(w * t / (wp * we)));
    Ok(v)
}

/// S(w) = Σ_λ w(λ) S(λ, w), the mutual information between π and ν under w.
pub fn avg_structural_similarity<P: Scalar>(class: &PairClass<P>, depth: usize) -> Result<LogValue> {
    check_fully_supported(class, depth)?;
    let t = class.total();
    let mut out = LogValue::zero::<P>();
    for (i, row) in class.weights().iter().enumerate() {
        for (j, w) in row.iter().enumerate() {
            if w.is_positive() {
                out = out.plus(&pointwise(class, i, j)?.scaled(&(w.clone() / t.clone())));
            }
        }
    }
    Ok(out)
}
