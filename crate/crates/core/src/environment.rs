use std::collections::HashMap;
use std::sync::Arc;

use crate::alphabet::Signature;
use crate::error::{CoreError, Result};
use crate::history::History;
use crate::policy::{check_dist, point_mass, uniform};
use crate::scalar::Scalar;

/// Conditional (semi)distribution over percepts given a history and an action.
pub trait Environment<P: Scalar>: Send + Sync {
    fn signature(&self) -> &Signature;
    /// ν(·|h, a); requires l(h) < depth.
    fn dist(&self, h: &History, a: usize) -> Result<Vec<P>>;
    fn is_proper(&self) -> bool {
        true
    }
    fn state_key(&self, _h: &History) -> Option<u64> {
        None
    }
}

pub type ActionFn<P> = Arc<dyn Fn(&History, usize) -> Vec<P> + Send + Sync>;

/// Environment given by a rule.
#[derive(Clone)]
pub struct FnEnvironment<P: Scalar> {
    sig: Signature,
    f: ActionFn<P>,
    key: Option<crate::policy::KeyFn>,
    proper: bool,
}

impl<P: Scalar> FnEnvironment<P> {
    pub fn new(sig: Signature, f: impl Fn(&History, usize) -> Vec<P> + Send + Sync + 'static) -> Self {
        FnEnvironment {
            sig,
            f: Arc::new(f),
            key: None,
            proper: true,
        }
    }

    pub fn deterministic(
        sig: Signature,
        f: impl Fn(&History, usize) -> usize + Send + Sync + 'static,
    ) -> Self {
        let n = sig.n_percepts();
        Self::new(sig, move |h, a| point_mass(n, f(h, a)))
    }

    /// Uniform over percepts regardless of the past.
    pub fn uniform(sig: Signature) -> Self {
        let n = sig.n_percepts();
        let mut e = Self::new(sig, move |_, _| uniform(n));
        e.key = Some(Arc::new(|_| 0));
        e
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

impl<P: Scalar> Environment<P> for FnEnvironment<P> {
    fn signature(&self) -> &Signature {
        &self.sig
    }

    fn dist(&self, h: &History, a: usize) -> Result<Vec<P>> {
        self.sig.check_extend(h.len())?;
        self.sig.actions.check(a)?;
        let d = (self.f)(h, a);
        if d.len() != self.sig.n_percepts() {
            return Err(CoreError::InvalidDistribution(format!(
                "environment returned {} entries for {} percepts",
                d.len(),
                self.sig.n_percepts()
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

/// Environment given by an exhaustive table over (history, action).
#[derive(Clone, Debug)]
pub struct TableEnvironment<P: Scalar> {
    sig: Signature,
    rows: HashMap<(History, usize), Vec<P>>,
    proper: bool,
}

impl<P: Scalar> TableEnvironment<P> {
    pub fn new(sig: Signature, rows: HashMap<(History, usize), Vec<P>>, proper: bool) -> Result<Self> {
        if sig.depth > 0 {
            for h in History::all_up_to(sig.depth - 1, sig.n_actions(), sig.n_percepts()) {
                for a in 0..sig.n_actions() {
                    let row = rows.get(&(h.clone(), a)).ok_or_else(|| {
                        CoreError::Table(format!("missing environment row for {} then {}", h, a))
                    })?;
                    if row.len() != sig.n_percepts() {
                        return Err(CoreError::Table(format!("row {} {} has wrong width", h, a)));
                    }
                    check_dist(row, proper, &h)?;
                }
            }
        }
        Ok(TableEnvironment { sig, rows, proper })
    }

    pub fn tabulate(e: &dyn Environment<P>) -> Result<Self> {
        let sig = e.signature().clone();
        let mut rows = HashMap::new();
        if sig.depth > 0 {
            for h in History::all_up_to(sig.depth - 1, sig.n_actions(), sig.n_percepts()) {
                for a in 0..sig.n_actions() {
                    rows.insert((h.clone(), a), e.dist(&h, a)?);
                }
            }
        }
        Self::new(sig, rows, e.is_proper())
    }

    pub fn rows(&self) -> &HashMap<(History, usize), Vec<P>> {
        &self.rows
    }
}

impl<P: Scalar> Environment<P> for TableEnvironment<P> {
    fn signature(&self) -> &Signature {
        &self.sig
    }

    fn dist(&self, h: &History, a: usize) -> Result<Vec<P>> {
        self.sig.check_extend(h.len())?;
        self.rows
            .get(&(h.clone(), a))
            .cloned()
            .ok_or_else(|| CoreError::Table(format!("missing environment row for {} then {}", h, a)))
    }

    fn is_proper(&self) -> bool {
        self.proper
    }
}

/// Fixed convex combination of environments.
pub struct BlendEnvironment<P: Scalar> {
    sig: Signature,
    parts: Vec<(P, Arc<dyn Environment<P>>)>,
}

impl<P: Scalar> BlendEnvironment<P> {
    pub fn new(parts: Vec<(P, Arc<dyn Environment<P>>)>) -> Result<Self> {
        let first = parts
            .first()
            .ok_or_else(|| CoreError::InvalidDistribution("empty blend".into()))?;
        let mut sig = first.1.signature().clone();
        for (_, e) in &parts {
            sig.matches(e.signature())?;
            sig.depth = sig.depth.min(e.signature().depth);
        }
        let coeffs: Vec<P> = parts.iter().map(|(c, _)| c.clone()).collect();
        check_dist(&coeffs, false, &"blend weights")?;
        Ok(BlendEnvironment { sig, parts })
    }
}

impl<P: Scalar> Environment<P> for BlendEnvironment<P> {
    fn signature(&self) -> &Signature {
        &self.sig
    }

    fn dist(&self, h: &History, a: usize) -> Result<Vec<P>> {
        self.sig.check_extend(h.len())?;
        let mut out = vec![P::zero(); self.sig.n_percepts()];
        for (c, e) in &self.parts {
            for (o, x) in out.iter_mut().zip(e.dist(h, a)?) {
                *o = o.clone() + c.clone() * x;
            }
        }
        Ok(out)
    }

    fn is_proper(&self) -> bool {
        let s: P = self.parts.iter().map(|(c, _)| c.clone()).sum();
        s == P::one() && self.parts.iter().all(|(_, e)| e.is_proper())
    }

    fn state_key(&self, h: &History) -> Option<u64> {
        let keys: Option<Vec<u64>> = self.parts.iter().map(|(_, e)| e.state_key(h)).collect();
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
            Alphabet::percepts(&["e0", "e1", "e2"]).unwrap(),
            depth,
        )
        .unwrap()
    }

    #[test]
    fn deterministic_environment() {
        let e = FnEnvironment::<Rational>::deterministic(sig(2), |_, a| a + 1);
        assert_eq!(e.dist(&History::empty(), 1).unwrap(), vec![q(0, 1), q(0, 1), q(1, 1)]);
        assert!(e.dist(&History::empty(), 2).is_err());
    }

    #[test]
    fn tabulate_round_trip() {
        let e = FnEnvironment::<Rational>::uniform(sig(2));
        let t = TableEnvironment::tabulate(&e).unwrap();
        let h = History::from_turns(vec![(1, 2)]);
        assert_eq!(t.dist(&h, 0).unwrap(), e.dist(&h, 0).unwrap());
        assert_eq!(t.rows().len(), (1 + 6) * 2);
    }

    #[test]
    fn blend_of_environments() {
        let d: Arc<dyn Environment<Rational>> = Arc::new(FnEnvironment::deterministic(sig(1), |_, _| 0));
        let u: Arc<dyn Environment<Rational>> = Arc::new(FnEnvironment::uniform(sig(1)));
        let b = BlendEnvironment::new(vec![(q(1, 2), d), (q(1, 2), u)]).unwrap();
        assert_eq!(
            b.dist(&History::empty(), 0).unwrap(),
            vec![q(2, 3), q(1, 6), q(1, 6)]
        );
    }
}
