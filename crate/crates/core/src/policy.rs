use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::alphabet::Signature;
use crate::error::{CoreError, Result};
use crate::history::History;
use crate::scalar::Scalar;

/// Tolerance used when float distributions are checked for properness.
pub const FLOAT_TOL: f64 = 1e-9;

/// Checks that `d` is a semidistribution, and sums to one when `proper`.
pub fn check_dist<P: Scalar>(d: &[P], proper: bool, what: &dyn fmt::Display) -> Result<()> {
    if d.iter().any(|p| *p < P::zero()) {
        return Err(CoreError::InvalidDistribution(format!("negative entry at {}", what)));
    }
    let s: P = d.iter().cloned().sum();
    let over = if P::EXACT {
        s > P::one()
    } else {
        s.to_f64() > 1.0 + FLOAT_TOL
    };
    if over {
        return Err(CoreError::InvalidDistribution(format!("mass {} > 1 at {}", s, what)));
    }
    if proper && !s.approx_eq(&P::one(), FLOAT_TOL) {
        return Err(CoreError::InvalidDistribution(format!(
            "mass {} != 1 at {} for a proper evaluator",
            s, what
        )));
    }
    Ok(())
}

/// One-hot distribution.
pub fn point_mass<P: Scalar>(n: usize, i: usize) -> Vec<P> {
    (0..n).map(|j| if j == i { P::one() } else { P::zero() }).collect()
}

pub fn uniform<P: Scalar>(n: usize) -> Vec<P> {
    vec![P::from_ratio(1, n as i64); n]
}

/// Conditional (semi)distribution over actions given a history.
pub trait Policy<P: Scalar>: Send + Sync {
    fn signature(&self) -> &Signature;
    /// π(·|h); requires l(h) < depth.
    fn dist(&self, h: &History) -> Result<Vec<P>>;
    fn is_proper(&self) -> bool {
        true
    }
    /// Optional summary of `h` such that histories with equal keys have equal
    /// futures; used for memoization.
    fn state_key(&self, _h: &History) -> Option<u64> {
        None
    }
}

pub type HistoryFn<P> = Arc<dyn Fn(&History) -> Vec<P> + Send + Sync>;
pub type KeyFn = Arc<dyn Fn(&History) -> u64 + Send + Sync>;

/// Policy given by a rule.
#[derive(Clone)]
pub struct FnPolicy<P: Scalar> {
    sig: Signature,
    f: HistoryFn<P>,
    key: Option<KeyFn>,
    proper: bool,
}

impl<P: Scalar> FnPolicy<P> {
    pub fn new(sig: Signature, f: impl Fn(&History) -> Vec<P> + Send + Sync + 'static) -> Self {
        FnPolicy {
            sig,
            f: Arc::new(f),
            key: None,
            proper: true,
        }
    }

    /// Deterministic rule choosing one action index per history.
    pub fn deterministic(sig: Signature, f: impl Fn(&History) -> usize + Send + Sync + 'static) -> Self {
        let n = sig.n_actions();
        Self::new(sig, move |h| point_mass(n, f(h)))
    }

    pub fn constant(sig: Signature, d: Vec<P>) -> Self {
        let mut p = Self::new(sig, move |_| d.clone());
        p.key = Some(Arc::new(|_| 0));
        p
    }

    pub fn uniform(sig: Signature) -> Self {
        let n = sig.n_actions();
        Self::constant(sig, uniform(n))
    }

    pub fn with_key(mut self, key: impl Fn(&History) -> u64 + Send + Sync + 'static) -> Self {
        self.key = Some(Arc::new(key));
        self
    }

    pub fn improper(mut self) -> Self {
        self.proper = false;
        self
    }
}

impl<P: Scalar> Policy<P> for FnPolicy<P> {
    fn signature(&self) -> &Signature {
        &self.sig
    }

    fn dist(&self, h: &History) -> Result<Vec<P>> {
        self.sig.check_extend(h.len())?;
        let d = (self.f)(h);
        if d.len() != self.sig.n_actions() {
            return Err(CoreError::InvalidDistribution(format!(
                "policy returned {} entries for {} actions",
                d.len(),
                self.sig.n_actions()
            )));
        }
        Ok(d)
    }

    fn is_proper(&self) -> bool {
        self.proper
    }

    fn state_key(&self, h: &History) -> Option<u64> {
        self.key.as_ref().map(|k| k(h))
    }
}

/// Policy given by an exhaustive table over histories shorter than the depth.
#[derive(Clone, Debug)]
pub struct TablePolicy<P: Scalar> {
    sig: Signature,
    rows: HashMap<History, Vec<P>>,
    proper: bool,
}

impl<P: Scalar> TablePolicy<P> {
    pub fn new(sig: Signature, rows: HashMap<History, Vec<P>>, proper: bool) -> Result<Self> {
        for h in History::all_up_to(sig.depth.saturating_sub(1), sig.n_actions(), sig.n_percepts()) {
            if sig.depth == 0 {
                break;
            }
            let row = rows
                .get(&h)
                .ok_or_else(|| CoreError::Table(format!("missing policy row for {}", h)))?;
            if row.len() != sig.n_actions() {
                return Err(CoreError::Table(format!("row {} has wrong width", h)));
            }
            check_dist(row, proper, &h)?;
        }
        Ok(TablePolicy { sig, rows, proper })
    }

    /// Tabulates any policy over its whole domain.
    pub fn tabulate(p: &dyn Policy<P>) -> Result<Self> {
        let sig = p.signature().clone();
        let mut rows = HashMap::new();
        if sig.depth > 0 {
            for h in History::all_up_to(sig.depth - 1, sig.n_actions(), sig.n_percepts()) {
                rows.insert(h.clone(), p.dist(&h)?);
            }
        }
        Self::new(sig, rows, p.is_proper())
    }

    pub fn rows(&self) -> &HashMap<History, Vec<P>> {
        &self.rows
    }
}

impl<P: Scalar> Policy<P> for TablePolicy<P> {
    fn signature(&self) -> &Signature {
        &self.sig
    }

    fn dist(&self, h: &History) -> Result<Vec<P>> {
        self.sig.check_extend(h.len())?;
        self.rows
            .get(h)
            .cloned()
            .ok_or_else(|| CoreError::Table(format!("missing policy row for {}", h)))
    }

    fn is_proper(&self) -> bool {
        self.proper
    }
}

/// Fixed convex combination Σ c_j π_j of policies (not a Bayesian mixture).
pub struct BlendPolicy<P: Scalar> {
    sig: Signature,
    parts: Vec<(P, Arc<dyn Policy<P>>)>,
}

impl<P: Scalar> BlendPolicy<P> {
    pub fn new(parts: Vec<(P, Arc<dyn Policy<P>>)>) -> Result<Self> {
        let first = parts
            .first()
            .ok_or_else(|| CoreError::InvalidDistribution("empty blend".into()))?;
        let mut sig = first.1.signature().clone();
        for (c, p) in &parts {
            sig.matches(p.signature())?;
            sig.depth = sig.depth.min(p.signature().depth);
            if *c < P::zero() {
                return Err(CoreError::InvalidDistribution("negative blend weight".into()));
            }
        }
        let coeffs: Vec<P> = parts.iter().map(|(c, _)| c.clone()).collect();
        check_dist(&coeffs, false, &"blend weights")?;
        Ok(BlendPolicy { sig, parts })
    }
}

impl<P: Scalar> Policy<P> for BlendPolicy<P> {
    fn signature(&self) -> &Signature {
        &self.sig
    }

    fn dist(&self, h: &History) -> Result<Vec<P>> {
        self.sig.check_extend(h.len())?;
        let mut out = vec![P::zero(); self.sig.n_actions()];
        for (c, p) in &self.parts {
            for (o, x) in out.iter_mut().zip(p.dist(h)?) {
                *o = o.clone() + c.clone() * x;
            }
        }
        Ok(out)
    }

    fn is_proper(&self) -> bool {
        let s: P = self.parts.iter().map(|(c, _)| c.clone()).sum();
        s == P::one() && self.parts.iter().all(|(_, p)| p.is_proper())
    }

    fn state_key(&self, h: &History) -> Option<u64> {
        let keys: Option<Vec<u64>> = self.parts.iter().map(|(_, p)| p.state_key(h)).collect();
        keys.map(|k| crate::hash_keys(&k))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alphabet::Alphabet;
    use crate::scalar::{q, Rational};

    fn sig(depth: usize) -> Signature {
        Signature::new(
            Alphabet::actions(&["a0", "a1"]).unwrap(),
            Alphabet::percepts(&["e0", "e1"]).unwrap(),
            depth,
        )
        .unwrap()
    }

    #[test]
    fn deterministic_policy_is_one_hot() {
        let p = FnPolicy::<Rational>::deterministic(sig(3), |h| h.len() % 2);
        assert_eq!(p.dist(&History::empty()).unwrap(), vec![q(1, 1), q(0, 1)]);
        let h = History::from_turns(vec![(0, 0)]);
        assert_eq!(p.dist(&h).unwrap(), vec![q(0, 1), q(1, 1)]);
    }

    #[test]
    fn depth_is_enforced() {
        let p = FnPolicy::<f64>::uniform(sig(1));
        let h = History::from_turns(vec![(0, 0)]);
        assert!(matches!(p.dist(&h), Err(CoreError::DepthExceeded { .. })));
    }

    #[test]
    fn table_requires_every_row() {
        let mut rows = HashMap::new();
        rows.insert(History::empty(), vec![q(1, 2), q(1, 2)]);
        assert!(TablePolicy::new(sig(2), rows.clone(), true).is_err());
        let t = TablePolicy::tabulate(&FnPolicy::<Rational>::uniform(sig(2))).unwrap();
        assert_eq!(t.rows().len(), 5);
    }

    #[test]
    fn table_rejects_improper_rows_when_proper() {
        let mut rows = HashMap::new();
        rows.insert(History::empty(), vec![q(1, 4), q(1, 2)]);
        assert!(TablePolicy::new(sig(1), rows.clone(), true).is_err());
        assert!(TablePolicy::new(sig(1), rows, false).is_ok());
    }

    #[test]
    fn blend_mixes_rows() {
        let a: Arc<dyn Policy<Rational>> = Arc::new(FnPolicy::deterministic(sig(2), |_| 0));
        let u: Arc<dyn Policy<Rational>> = Arc::new(FnPolicy::uniform(sig(2)));
        let b = BlendPolicy::new(vec![(q(3, 4), a), (q(1, 4), u)]).unwrap();
        assert_eq!(b.dist(&History::empty()).unwrap(), vec![q(7, 8), q(1, 8)]);
        assert!(b.is_proper());
    }
}
