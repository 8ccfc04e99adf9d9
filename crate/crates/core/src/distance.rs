use crate::error::{CoreError, Result};
use crate::history::History;
use crate::scalar::Scalar;
use crate::universe::Universe;

/// k-step total variation D_k(P1, P2 | h) = ½ Σ_{h' ∈ (𝒜ℰ)^k} |P1(h'|h) − P2(h'|h)|.
///
/// Subtrees where a universe has no mass are not queried for its conditionals.
pub fn total_variation_k<P: Scalar>(
    p1: &dyn Universe<P>,
    p2: &dyn Universe<P>,
    h: &History,
    k: usize,
) -> Result<P> {
    if k == 0 {
        return Err(CoreError::InvalidDistribution("total variation needs k >= 1".into()));
    }
    p1.signature().matches(p2.signature())?;
    let s = walk(p1, p2, h, k, P::one(), P::one())?;
    Ok(s / P::from_ratio(2, 1))
}

fn walk<P: Scalar>(
    p1: &dyn Universe<P>,
    p2: &dyn Universe<P>,
    h: &History,
    left: usize,
    m1: P,
    m2: P,
) -> Result<P> {
    if left == 0 {
        return Ok((m1 - m2).abs_val());
    }
    let live1 = m1.is_positive();
    let live2 = m2.is_positive();
    if !live1 && !live2 {
        return Ok(P::zero());
    }
    let sig = p1.signature();
    let na = sig.n_actions();
    let ne = sig.n_percepts();
    let a1 = if live1 { Some(p1.action_dist(h)?) } else { None };
    let a2 = if live2 { Some(p2.action_dist(h)?) } else { None };
    let mut total = P::zero();
    for a in 0..na {
        let m1a = match &a1 {
            Some(d) => m1.clone() * d[a].clone(),
            None => P::zero(),
        };
        let m2a = match &a2 {
            Some(d) => m2.clone() * d[a].clone(),
            None => P::zero(),
        };
        if !m1a.is_positive() && !m2a.is_positive() {
            continue;
        }
        let e1 = if m1a.is_positive() { Some(p1.percept_dist(h, a)?) } else { None };
        let e2 = if m2a.is_positive() { Some(p2.percept_dist(h, a)?) } else { None };
        for e in 0..ne {
            let n1 = match &e1 {
                Some(d) => m1a.clone() * d[e].clone(),
                None => P::zero(),
            };
            let n2 = match &e2 {
                Some(d) => m2a.clone() * d[e].clone(),
                None => P::zero(),
            };
            if !n1.is_positive() && !n2.is_positive() {
                continue;
            }
            total = total + walk(p1, p2, &h.extended(a, e), left - 1, n1, n2)?;
        }
    }
    Ok(total)
}
