//! Joint (semi)measures over interleaved action/percept histories.

use std::collections::HashMap;
use std::sync::Arc;

use crate::alphabet::Signature;
use crate::environment::Environment;
use crate::error::{CoreError, Result};
use crate::history::History;
use crate::policy::{check_dist, Policy};
use crate::scalar::Scalar;

/// A universe λ: prefix masses λ(h), λ(ha) and their conditionals.
///
/// `action_dist` and `percept_dist` return the completed conditionals: the
/// ratio λ(ha)/λ(h) (resp. λ(hae)/λ(ha)) where the denominator is positive,
/// and the attached completion elsewhere. Without a completion they fail with
/// `UndefinedConditional` on zero-mass prefixes.
pub trait Universe<P: Scalar>: Send + Sync {
    fn signature(&self) -> &Signature;
    fn mass(&self, h: &History) -> Result<P>;
    fn mass_action(&self, h: &History, a: usize) -> Result<P>;
    fn action_dist(&self, h: &History) -> Result<Vec<P>>;
    fn percept_dist(&self, h: &History, a: usize) -> Result<Vec<P>>;
    /// Histories with equal keys (and equal length budget) have identical
    /// conditional futures. `None` disables memoization.
    fn state_key(&self, _h: &History) -> Option<u64> {
        None
    }
}

/// λ(·|h) for a universe.
pub fn conditional_action<P: Scalar>(u: &dyn Universe<P>, h: &History) -> Result<Vec<P>> {
    u.action_dist(h)
}

/// λ(·|h a) for a universe.
pub fn conditional_percept<P: Scalar>(u: &dyn Universe<P>, h: &History, a: usize) -> Result<Vec<P>> {
    u.percept_dist(h, a)
}

/// λ(tail | h): product of completed conditionals along `tail` starting at `h`.
pub fn continuation_mass<P: Scalar>(u: &dyn Universe<P>, h: &History, tail: &History) -> Result<P> {
    let mut cur = h.clone();
    let mut m = P::one();
    for &(a, e) in tail.turns() {
        let pa = u.action_dist(&cur)?[a].clone();
        if pa.is_zero() {
            return Ok(P::zero());
        }
        let pe = u.percept_dist(&cur, a)?[e].clone();
        if pe.is_zero() {
            return Ok(P::zero());
        }
        m = m * pa * pe;
        cur.push(a, e);
    }
    Ok(m)
}

/// Exhaustive check of λ(ε)=1, λ(h) ≥ Σ_a λ(ha), λ(ha) ≥ Σ_e λ(hae) up to `depth`.
pub fn check_semimeasure<P: Scalar>(u: &dyn Universe<P>, depth: usize) -> Result<()> {
    let sig = u.signature();
    if u.mass(&History::empty())? != P::one() {
        return Err(CoreError::InvalidDistribution("λ(ε) != 1".into()));
    }
    let mut frontier = vec![History::empty()];
    for _ in 0..depth {
        let mut next = Vec::new();
        for h in frontier {
            let mh = u.mass(&h)?;
            let mut sa = P::zero();
            for a in 0..sig.n_actions() {
                let mha = u.mass_action(&h, a)?;
                sa = sa + mha.clone();
                let mut se = P::zero();
                for e in 0..sig.n_percepts() {
                    let hae = h.extended(a, e);
                    se = se + u.mass(&hae)?;
                    next.push(hae);
                }
                if exceeds(&se, &mha) {
                    return Err(CoreError::InvalidDistribution(format!("λ({} {}) < Σ_e", h, a)));
                }
            }
            if exceeds(&sa, &mh) {
                return Err(CoreError::InvalidDistribution(format!("λ({}) < Σ_a", h)));
            }
        }
        frontier = next;
    }
    Ok(())
}

fn exceeds<P: Scalar>(x: &P, bound: &P) -> bool {
    if P::EXACT {
        x > bound
    } else {
        x.to_f64() > bound.to_f64() + crate::policy::FLOAT_TOL
    }
}

/// The universe ν^π of a policy interacting with an environment.
#[derive(Clone)]
pub struct Interaction<P: Scalar> {
    sig: Signature,
    policy: Arc<dyn Policy<P>>,
    env: Arc<dyn Environment<P>>,
    factor_completion: bool,
}

/// Composes π and ν into λ(h) = Π π(a_i|h_<i) ν(e_i|h_<i a_i).
pub fn interact<P: Scalar>(pi: Arc<dyn Policy<P>>, nu: Arc<dyn Environment<P>>) -> Result<Interaction<P>> {
    pi.signature().matches(nu.signature())?;
    let depth = pi.signature().depth.min(nu.signature().depth);
    Ok(Interaction {
        sig: pi.signature().with_depth(depth),
        policy: pi,
        env: nu,
        factor_completion: false,
    })
}

impl<P: Scalar> Interaction<P> {
    /// Use π(·|h) and ν(·|h,a) as conditionals even at zero-mass prefixes.
    pub fn with_factor_completion(mut self) -> Self {
        self.factor_completion = true;
        self
    }

    pub fn policy(&self) -> &Arc<dyn Policy<P>> {
        &self.policy
    }

    pub fn environment(&self) -> &Arc<dyn Environment<P>> {
        &self.env
    }

    pub fn has_factor_completion(&self) -> bool {
        self.factor_completion
    }
}

impl<P: Scalar> Universe<P> for Interaction<P> {
    fn signature(&self) -> &Signature {
        &self.sig
    }

    fn mass(&self, h: &History) -> Result<P> {
        self.sig.check_len(h.len())?;
        let mut m = P::one();
        let mut cur = History::empty();
        for &(a, e) in h.turns() {
            m = m * self.policy.dist(&cur)?[a].clone();
            if m.is_zero() {
                return Ok(m);
            }
            m = m * self.env.dist(&cur, a)?[e].clone();
            if m.is_zero() {
                return Ok(m);
            }
            cur.push(a, e);
        }
        Ok(m)
    }

    fn mass_action(&self, h: &History, a: usize) -> Result<P> {
        self.sig.check_extend(h.len())?;
        let m = self.mass(h)?;
        if m.is_zero() {
            return Ok(m);
        }
        Ok(m * self.policy.dist(h)?[a].clone())
    }

    fn action_dist(&self, h: &History) -> Result<Vec<P>> {
        self.sig.check_extend(h.len())?;
        if self.factor_completion || self.mass(h)?.is_positive() {
            self.policy.dist(h)
        } else {
            Err(CoreError::UndefinedConditional {
                history: h.clone(),
                action: None,
            })
        }
    }

    fn percept_dist(&self, h: &History, a: usize) -> Result<Vec<P>> {
        self.sig.check_extend(h.len())?;
        if self.factor_completion || self.mass_action(h, a)?.is_positive() {
            self.env.dist(h, a)
        } else {
            Err(CoreError::UndefinedConditional {
                history: h.clone(),
                action: Some(a),
            })
        }
    }

    fn state_key(&self, h: &History) -> Option<u64> {
        let kp = self.policy.state_key(h)?;
        let ke = self.env.state_key(h)?;
        // Without the factor completion, whether the prefix has mass matters too.
        if self.factor_completion {
            Some(crate::hash_keys(&[kp, ke]))
        } else {
            let alive = self.mass(h).ok()?.is_positive() as u64;
            Some(crate::hash_keys(&[kp, ke, alive]))
        }
    }
}

/// A universe given by conditional rows on its positive-mass prefixes.
#[derive(Clone)]
pub struct TableUniverse<P: Scalar> {
    sig: Signature,
    action_rows: HashMap<History, Vec<P>>,
    percept_rows: HashMap<(History, usize), Vec<P>>,
    completion: Option<Arc<dyn Universe<P>>>,
}

impl<P: Scalar> TableUniverse<P> {
    /// Rows must be present at every prefix of positive mass; rows at
    /// zero-mass prefixes are ignored.
    pub fn new(
        sig: Signature,
        action_rows: HashMap<History, Vec<P>>,
        percept_rows: HashMap<(History, usize), Vec<P>>,
    ) -> Result<Self> {
        let u = TableUniverse {
            sig,
            action_rows,
            percept_rows,
            completion: None,
        };
        u.validate()?;
        Ok(u)
    }

    /// Tabulates the conditionals of any universe on its support.
    pub fn tabulate(u: &dyn Universe<P>) -> Result<Self> {
        let sig = u.signature().clone();
        let mut action_rows = HashMap::new();
        let mut percept_rows = HashMap::new();
        let mut frontier = vec![History::empty()];
        for _ in 0..sig.depth {
            let mut next = Vec::new();
            for h in frontier {
                if !u.mass(&h)?.is_positive() {
                    continue;
                }
                let ad = u.action_dist(&h)?;
                for a in 0..sig.n_actions() {
                    if !ad[a].is_positive() {
                        continue;
                    }
                    percept_rows.insert((h.clone(), a), u.percept_dist(&h, a)?);
                    for e in 0..sig.n_percepts() {
                        next.push(h.extended(a, e));
                    }
                }
                action_rows.insert(h, ad);
            }
            frontier = next;
        }
        Self::new(sig, action_rows, percept_rows)
    }

    pub fn with_completion(mut self, completion: Arc<dyn Universe<P>>) -> Result<Self> {
        self.sig.matches(completion.signature())?;
        self.completion = Some(completion);
        Ok(self)
    }

    pub fn action_rows(&self) -> &HashMap<History, Vec<P>> {
        &self.action_rows
    }

    pub fn percept_rows(&self) -> &HashMap<(History, usize), Vec<P>> {
        &self.percept_rows
    }

    fn validate(&self) -> Result<()> {
        let mut frontier = vec![History::empty()];
        for _ in 0..self.sig.depth {
            let mut next = Vec::new();
            for h in frontier {
                let row = self
                    .action_rows
                    .get(&h)
                    .ok_or_else(|| CoreError::Table(format!("missing action row at {}", h)))?;
                if row.len() != self.sig.n_actions() {
                    return Err(CoreError::Table(format!("action row {} has wrong width", h)));
                }
                check_dist(row, false, &h)?;
                for (a, pa) in row.iter().enumerate() {
                    if !pa.is_positive() {
                        continue;
                    }
                    let prow = self.percept_rows.get(&(h.clone(), a)).ok_or_else(|| {
                        CoreError::Table(format!("missing percept row at {} then {}", h, a))
                    })?;
                    if prow.len() != self.sig.n_percepts() {
                        return Err(CoreError::Table(format!("percept row {} {} has wrong width", h, a)));
                    }
                    check_dist(prow, false, &h)?;
                    for (e, pe) in prow.iter().enumerate() {
                        if pe.is_positive() {
                            next.push(h.extended(a, e));
                        }
                    }
                }
            }
            frontier = next;
        }
        Ok(())
    }
}

impl<P: Scalar> Universe<P> for TableUniverse<P> {
    fn signature(&self) -> &Signature {
        &self.sig
    }

    fn mass(&self, h: &History) -> Result<P> {
        self.sig.check_len(h.len())?;
        let mut m = P::one();
        let mut cur = History::empty();
        for &(a, e) in h.turns() {
            let pa = match self.action_rows.get(&cur) {
                Some(r) => r[a].clone(),
                None => return Ok(P::zero()),
            };
            m = m * pa;
            if m.is_zero() {
                return Ok(m);
            }
            let pe = match self.percept_rows.get(&(cur.clone(), a)) {
                Some(r) => r[e].clone(),
                None => return Ok(P::zero()),
            };
            m = m * pe;
            if m.is_zero() {
                return Ok(m);
            }
            cur.push(a, e);
        }
        Ok(m)
    }

    fn mass_action(&self, h: &History, a: usize) -> Result<P> {
        self.sig.check_extend(h.len())?;
        let m = self.mass(h)?;
        if m.is_zero() {
            return Ok(m);
        }
        Ok(m * self.action_rows[h][a].clone())
    }

    fn action_dist(&self, h: &History) -> Result<Vec<P>> {
        self.sig.check_extend(h.len())?;
        if self.mass(h)?.is_positive() {
            return Ok(self.action_rows[h].clone());
        }
        match &self.completion {
            Some(c) => c.action_dist(h),
            None => Err(CoreError::UndefinedConditional {
                history: h.clone(),
                action: None,
            }),
        }
    }

    fn percept_dist(&self, h: &History, a: usize) -> Result<Vec<P>> {
        self.sig.check_extend(h.len())?;
        if self.mass_action(h, a)?.is_positive() {
            return Ok(self.percept_rows[&(h.clone(), a)].clone());
        }
        match &self.completion {
            Some(c) => c.percept_dist(h, a),
            None => Err(CoreError::UndefinedConditional {
                history: h.clone(),
                action: Some(a),
            }),
        }
    }
}

/// Any universe with a completion used wherever its own conditional is undefined.
pub struct Completed<P: Scalar> {
    inner: Arc<dyn Universe<P>>,
    completion: Arc<dyn Universe<P>>,
}

impl<P: Scalar> Completed<P> {
    pub fn new(inner: Arc<dyn Universe<P>>, completion: Arc<dyn Universe<P>>) -> Result<Self> {
        inner.signature().matches(completion.signature())?;
        Ok(Completed { inner, completion })
    }
}

impl<P: Scalar> Universe<P> for Completed<P> {
    fn signature(&self) -> &Signature {
        self.inner.signature()
    }

    fn mass(&self, h: &History) -> Result<P> {
        self.inner.mass(h)
    }

    fn mass_action(&self, h: &History, a: usize) -> Result<P> {
        self.inner.mass_action(h, a)
    }

    fn action_dist(&self, h: &History) -> Result<Vec<P>> {
        match self.inner.action_dist(h) {
            Err(CoreError::UndefinedConditional { .. }) => self.completion.action_dist(h),
            other => other,
        }
    }

    fn percept_dist(&self, h: &History, a: usize) -> Result<Vec<P>> {
        match self.inner.percept_dist(h, a) {
            Err(CoreError::UndefinedConditional { .. }) => self.completion.percept_dist(h, a),
            other => other,
        }
    }
}

/// The action part λ(a|h) of a universe, viewed as a policy.
pub struct ActionPart<P: Scalar>(pub Arc<dyn Universe<P>>);

impl<P: Scalar> Policy<P> for ActionPart<P> {
    fn signature(&self) -> &Signature {
        self.0.signature()
    }

    fn dist(&self, h: &History) -> Result<Vec<P>> {
        self.0.action_dist(h)
    }

    fn state_key(&self, h: &History) -> Option<u64> {
        self.0.state_key(h)
    }
}

/// The percept part λ(e|h a) of a universe, viewed as an environment.
pub struct PerceptPart<P: Scalar>(pub Arc<dyn Universe<P>>);

impl<P: Scalar> Environment<P> for PerceptPart<P> {
    fn signature(&self) -> &Signature {
        self.0.signature()
    }

    fn dist(&self, h: &History, a: usize) -> Result<Vec<P>> {
        self.0.percept_dist(h, a)
    }

    fn state_key(&self, h: &History) -> Option<u64> {
        self.0.state_key(h)
    }
}
