//! Multi-agent environments and their marginalization into personal environments.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use crate::alphabet::Signature;
use crate::environment::Environment;
use crate::error::{CoreError, Result};
use crate::history::{History, JointHistory};
use crate::policy::Policy;
use crate::scalar::Scalar;

/// Sparse joint percept distribution: (joint percept, probability) pairs.
pub type JointDist<P> = Vec<(Vec<usize>, P)>;

/// ν̄(ē | h̄, ā) for N agents with their own alphabets.
pub trait MultiAgentEnv<P: Scalar>: Send + Sync {
    fn n_agents(&self) -> usize;
    /// Alphabets and depth of agent `i`.
    fn agent_signature(&self, i: usize) -> &Signature;
    fn dist(&self, h: &JointHistory, actions: &[usize]) -> Result<JointDist<P>>;
    fn is_proper(&self) -> bool {
        true
    }
    fn depth(&self) -> usize {
        (0..self.n_agents())
            .map(|i| self.agent_signature(i).depth)
            .min()
            .unwrap_or(0)
    }
}

/// Multi-agent environment given by a rule.
pub struct FnMultiAgentEnv<P: Scalar> {
    sigs: Vec<Signature>,
    f: Arc<dyn Fn(&JointHistory, &[usize]) -> JointDist<P> + Send + Sync>,
}

impl<P: Scalar> FnMultiAgentEnv<P> {
    pub fn new(
        sigs: Vec<Signature>,
        f: impl Fn(&JointHistory, &[usize]) -> JointDist<P> + Send + Sync + 'static,
    ) -> Result<Self> {
        if sigs.is_empty() {
            return Err(CoreError::InvalidAlphabet("no agents".into()));
        }
        Ok(FnMultiAgentEnv { sigs, f: Arc::new(f) })
    }
}

impl<P: Scalar> MultiAgentEnv<P> for FnMultiAgentEnv<P> {
    fn n_agents(&self) -> usize {
        self.sigs.len()
    }

    fn agent_signature(&self, i: usize) -> &Signature {
        &self.sigs[i]
    }

    fn dist(&self, h: &JointHistory, actions: &[usize]) -> Result<JointDist<P>> {
        if h.len() >= self.depth() {
            return Err(CoreError::DepthExceeded {
                len: h.len() + 1,
                max: self.depth(),
            });
        }
        for (i, &a) in actions.iter().enumerate() {
            self.sigs[i].actions.check(a)?;
        }
        Ok((self.f)(h, actions))
    }
}

/// A single-agent environment seen as a one-agent multi-agent environment.
pub struct SoloEnv<P: Scalar>(pub Arc<dyn Environment<P>>);

impl<P: Scalar> MultiAgentEnv<P> for SoloEnv<P> {
    fn n_agents(&self) -> usize {
        1
    }

    fn agent_signature(&self, _i: usize) -> &Signature {
        self.0.signature()
    }

    fn dist(&self, h: &JointHistory, actions: &[usize]) -> Result<JointDist<P>> {
        let d = self.0.dist(&h.personal(0), actions[0])?;
        Ok(d.into_iter()
            .enumerate()
            .filter(|(_, p)| !p.is_zero())
            .map(|(e, p)| (vec![e], p))
            .collect())
    }

    fn is_proper(&self) -> bool {
        self.0.is_proper()
    }
}

type Filter<P> = Arc<Vec<(JointHistory, P)>>;

/// The personal environment of agent `i` once the other agents' policies are
/// fixed: co-player actions and percepts are summed out exactly.
pub struct PersonalEnvironment<P: Scalar> {
    sig: Signature,
    menv: Arc<dyn MultiAgentEnv<P>>,
    /// Indexed by agent; `None` at the ego slot.
    co: Vec<Option<Arc<dyn Policy<P>>>>,
    ego: usize,
    cache: Mutex<HashMap<History, Filter<P>>>,
}

/// Marginalizes `menv` with `co_policies` (one per other agent, in agent order)
/// into the personal environment of agent `i`.
pub fn personal_environment<P: Scalar>(
    menv: Arc<dyn MultiAgentEnv<P>>,
    co_policies: Vec<Arc<dyn Policy<P>>>,
    i: usize,
) -> Result<PersonalEnvironment<P>> {
    let n = menv.n_agents();
    if i >= n {
        return Err(CoreError::IndexOutOfRange { index: i, size: n });
    }
    if co_policies.len() + 1 != n {
        return Err(CoreError::AlphabetMismatch(format!(
            "{} co-policies for {} agents",
            co_policies.len(),
            n
        )));
    }
    let mut co = Vec::with_capacity(n);
    let mut it = co_policies.into_iter();
    let mut depth = menv.depth();
    for j in 0..n {
        if j == i {
            co.push(None);
            continue;
        }
        let p = it.next().expect("count checked");
        menv.agent_signature(j).matches(p.signature())?;
        if !p.is_proper() {
            return Err(CoreError::ImproperCoPolicy {
                agent: j,
                history: "declared improper".into(),
            });
        }
        depth = depth.min(p.signature().depth);
        co.push(Some(p));
    }
    let sig = menv.agent_signature(i).with_depth(depth);
    Ok(PersonalEnvironment {
        sig,
        menv,
        co,
        ego: i,
        cache: Mutex::new(HashMap::new()),
    })
}

impl<P: Scalar> PersonalEnvironment<P> {
    /// Joint histories consistent with the ego history `h`, weighted by the
    /// product of co-player policy terms and environment terms.
    fn filter(&self, h: &History) -> Result<Filter<P>> {
        if let Some(f) = self.cache.lock().expect("cache poisoned").get(h) {
            return Ok(f.clone());
        }
        let out: Filter<P> = if h.is_empty() {
            Arc::new(vec![(JointHistory::empty(), P::one())])
        } else {
            let parent = self.filter(&h.prefix(h.len() - 1))?;
            let (a, e) = h.last().expect("non-empty");
            let mut next = Vec::new();
            for (jh, w) in parent.iter() {
                for (acts, pw) in self.co_actions(jh, a, w.clone())? {
                    for (ebar, pe) in self.menv.dist(jh, &acts)? {
                        if ebar[self.ego] != e || pe.is_zero() {
                            continue;
                        }
                        next.push((jh.extended(acts.clone(), ebar), pw.clone() * pe));
                    }
                }
            }
            Arc::new(next)
        };
        self.cache
            .lock()
            .expect("cache poisoned")
            .insert(h.clone(), out.clone());
        Ok(out)
    }

    /// Joint action profiles with the ego playing `a`, weighted by `w` times the
    /// co-player probabilities.
    fn co_actions(&self, jh: &JointHistory, a: usize, w: P) -> Result<Vec<(Vec<usize>, P)>> {
        let mut profiles = vec![(Vec::with_capacity(self.co.len()), w)];
        for (j, slot) in self.co.iter().enumerate() {
            let mut next = Vec::new();
            match slot {
                None => {
                    for (mut acts, p) in profiles {
                        acts.push(a);
                        next.push((acts, p));
                    }
                }
                Some(pol) => {
                    let hj = jh.personal(j);
                    let d = pol.dist(&hj)?;
                    let s: P = d.iter().cloned().sum();
                    if !s.approx_eq(&P::one(), crate::policy::FLOAT_TOL) {
                        return Err(CoreError::ImproperCoPolicy {
                            agent: j,
                            history: hj.to_string(),
                        });
                    }
                    for (acts, p) in profiles {
                        for (b, pb) in d.iter().enumerate() {
                            if pb.is_zero() {
                                continue;
                            }
                            let mut acts = acts.clone();
                            acts.push(b);
                            next.push((acts, p.clone() * pb.clone()));
                        }
                    }
                }
            }
            profiles = next;
        }
        Ok(profiles)
    }
}

impl<P: Scalar> Environment<P> for PersonalEnvironment<P> {
    fn signature(&self) -> &Signature {
        &self.sig
    }

    fn dist(&self, h: &History, a: usize) -> Result<Vec<P>> {
        self.sig.check_extend(h.len())?;
        self.sig.actions.check(a)?;
        let filter = self.filter(h)?;
        let mut num = vec![P::zero(); self.sig.n_percepts()];
        for (jh, w) in filter.iter() {
            for (acts, pw) in self.co_actions(jh, a, w.clone())? {
                for (ebar, pe) in self.menv.dist(jh, &acts)? {
                    let slot = &mut num[ebar[self.ego]];
                    *slot = slot.clone() + pw.clone() * pe;
                }
            }
        }
        let den: P = num.iter().cloned().sum();
        if den.is_zero() {
            return Err(CoreError::UndefinedConditional {
                history: h.clone(),
                action: Some(a),
            });
        }
        Ok(num.into_iter().map(|x| x / den.clone()).collect())
    }

    fn is_proper(&self) -> bool {
        true
    }
}
