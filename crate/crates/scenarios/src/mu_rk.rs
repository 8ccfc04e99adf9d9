//! μ_{R,k}: a safe reward R for never leaving "up", and reward 1 once the
//! last k+1 actions are all "down".

use std::sync::Arc;

use ebw_core::{
    hash_of, interact, policy::point_mass, Alphabet, BlendEnvironment, Environment, FnEnvironment, FnPolicy, History,
    Interaction, Policy, Scalar, Signature,
};

use crate::error::{out_of_range, Result};

pub const UP: usize = 0;
pub const DOWN: usize = 1;

/// Percept indices of rewards 0, R and 1.
pub const ZERO: usize = 0;
pub const SAFE: usize = 1;
pub const ONE: usize = 2;

#[derive(Clone)]
pub struct MuRk<P: Scalar> {
    r: P,
    k: usize,
    sig: Signature,
}

/// Whether every action of `h` is up, and the number of trailing downs
/// capped at k + 1: the state that determines all future rewards.
fn state(h: &History, k: usize) -> (bool, usize) {
    let all_up = h.actions().all(|a| a == UP);
    let trailing = h.actions().collect::<Vec<_>>().iter().rev().take_while(|&&a| a == DOWN).count();
    (all_up, trailing.min(k + 1))
}

impl<P: Scalar> MuRk<P> {
    pub fn new(r: P, k: usize, depth: usize) -> Result<Self> {
        if !r.is_positive() || r >= P::one() {
            return Err(out_of_range("R", &r, "0 < R < 1"));
        }
        if k == 0 {
            return Err(out_of_range("k", k, "k ≥ 1"));
        }
        let sig = Signature::new(
            Alphabet::actions(&["up", "down"])?,
            Alphabet::percepts(&["o:0".to_string(), format!("o:{}", r.token()), "o:1".to_string()])?,
            depth,
        )?;
        Ok(MuRk { r, k, sig })
    }

    pub fn r(&self) -> &P {
        &self.r
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn signature(&self) -> &Signature {
        &self.sig
    }

    /// Percept after `h` and action `a`.
    pub fn percept(&self, h: &History, a: usize) -> usize {
        let (all_up, trailing) = state(h, self.k);
        if all_up && a == UP {
            SAFE
        } else if a == DOWN && trailing + 1 > self.k {
            ONE
        } else {
            ZERO
        }
    }

    /// The deterministic environment, memoizable on (all up, trailing downs).
    pub fn environment(&self) -> Arc<dyn Environment<P>> {
        let me = self.clone();
        let k = self.k;
        Arc::new(
            FnEnvironment::deterministic(self.sig.clone(), move |h, a| me.percept(h, a))
                .with_key(move |h| hash_of(&state(h, k))),
        )
    }

    /// μ blended with the uniform environment at weight η, so every node is
    /// within total variation η of μ.
    pub fn perturbed(&self, eta: &P) -> Result<Arc<dyn Environment<P>>> {
        let uniform: Arc<dyn Environment<P>> = Arc::new(FnEnvironment::uniform(self.sig.clone()));
        Ok(Arc::new(BlendEnvironment::new(vec![
            (P::one() - eta.clone(), self.environment()),
            (eta.clone(), uniform),
        ])?))
    }

    pub fn pi_up(&self) -> Arc<dyn Policy<P>> {
        Arc::new(FnPolicy::constant(self.sig.clone(), point_mass(2, UP)))
    }

    pub fn pi_down(&self) -> Arc<dyn Policy<P>> {
        Arc::new(FnPolicy::constant(self.sig.clone(), point_mass(2, DOWN)))
    }

    /// μ^π with factor completion: the self-model universe of an agent that
    /// believes it runs π.
    pub fn self_model(&self, pi: Arc<dyn Policy<P>>, env: Arc<dyn Environment<P>>) -> Result<Interaction<P>> {
        Ok(interact(pi, env)?.with_factor_completion())
    }
}
