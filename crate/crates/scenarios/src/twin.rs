//! The repeated Twin Prisoner's Dilemma: switch policies, the twin prior over
//! (self policy, co-player) pairs, its decoupled ν_copy counterpart and the
//! defection-mass thresholds that decide the cooperation onset.

use std::fmt;
use std::sync::Arc;

use ebw_bayes::{CompletionMode, MixtureEnvironment, MixtureUniverse, PairClass};
use ebw_core::{
    policy::point_mass, BlendEnvironment, BlendPolicy, Environment, FnEnvironment, FnPolicy, History, Policy,
    Scalar, Signature,
};
use serde::{Deserialize, Serialize};

use crate::error::{out_of_range, Result, ScenarioError};
use crate::games::{prisoner_dilemma, COOPERATE, DEFECT};
use crate::repeated::RepeatedGame;

/// Defects for the first `switch` rounds, then cooperates; `None` defects forever.
pub struct SwitchPolicy {
    sig: Signature,
    switch: Option<usize>,
}

impl SwitchPolicy {
    pub fn new(sig: Signature, switch: Option<usize>) -> Self {
        SwitchPolicy { sig, switch }
    }

    fn action(&self, round: usize) -> usize {
        match self.switch {
            Some(t) if round >= t => COOPERATE,
            _ => DEFECT,
        }
    }
}

impl<P: Scalar> Policy<P> for SwitchPolicy {
    fn signature(&self) -> &Signature {
        &self.sig
    }

    fn dist(&self, h: &History) -> ebw_core::Result<Vec<P>> {
        self.sig.check_extend(h.len())?;
        Ok(point_mass(self.sig.n_actions(), self.action(h.len())))
    }

    fn state_key(&self, h: &History) -> Option<u64> {
        Some(self.switch.map_or(0, |t| h.len().min(t)) as u64)
    }
}

pub type NamedPolicy<P> = (String, Arc<dyn Policy<P>>);

/// {π_T}_{T=0..K} ∪ {AllD} on a PD signature (D = 0, C = 1).
pub fn switch_policy_class<P: Scalar>(sig: &Signature, k: usize) -> Vec<NamedPolicy<P>> {
    let mut out: Vec<NamedPolicy<P>> = (0..=k)
        .map(|t| (format!("switch{}", t), Arc::new(SwitchPolicy::new(sig.clone(), Some(t))) as Arc<dyn Policy<P>>))
        .collect();
    out.push(("allD".to_string(), Arc::new(SwitchPolicy::new(sig.clone(), None))));
    out
}

/// m(h) = Σ_π w̃(π) Π_t π(a_t | h_<t): prior mass of policies producing the
/// actions of `h`.
pub fn m_of<P: Scalar>(policies: &[NamedPolicy<P>], tilde_w: &[P], h: &History) -> Result<P> {
    let mut total = P::zero();
    for ((_, pi), w) in policies.iter().zip(tilde_w) {
        let mut l = w.clone();
        for t in 0..h.len() {
            if l.is_zero() {
                break;
            }
            let (a, _) = h.turns()[t];
            l = l * pi.dist(&h.prefix(t))?[a].clone();
        }
        total = total + l;
    }
    Ok(total)
}

/// Symmetric history in which both players played `actions`.
pub fn symmetric_history<P: Scalar>(game: &RepeatedGame<P>, actions: &[usize]) -> History {
    History::from_turns(actions.iter().map(|&a| (a, game.percept(0, a, a))).collect())
}

/// m_k^defect = m((D,D)^k), with m_0 = 1 for a normalized w̃.
pub fn m_defect<P: Scalar>(
    game: &RepeatedGame<P>,
    policies: &[NamedPolicy<P>],
    tilde_w: &[P],
    k: usize,
) -> Result<P> {
    m_of(policies, tilde_w, &symmetric_history(game, &vec![DEFECT; k]))
}

/// max over symmetric histories of length t of m(h).
pub fn m_star<P: Scalar>(game: &RepeatedGame<P>, policies: &[NamedPolicy<P>], tilde_w: &[P], t: usize) -> Result<P> {
    let mut best = P::zero();
    for code in 0..(1usize << t) {
        let acts: Vec<usize> = (0..t).map(|s| (code >> (t - 1 - s)) & 1).collect();
        best = P::max_of(best, m_of(policies, tilde_w, &symmetric_history(game, &acts))?);
    }
    Ok(best)
}

/// Number of defection rounds before the embedded agents cooperate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Onset {
    Round(usize),
    Never,
}

impl fmt::Display for Onset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Onset::Round(t) => write!(f, "{}", t),
            Onset::Never => write!(f, "never"),
        }
    }
}

/// m/(1+m), the α threshold above which cooperation beats defection.
pub fn threshold<P: Scalar>(m: &P) -> P {
    m.clone() / (P::one() + m.clone())
}

/// Smallest k ≤ `max_k` with α > m_k/(1+m_k); ties defect.
pub fn cooperation_onset<P: Scalar>(
    game: &RepeatedGame<P>,
    policies: &[NamedPolicy<P>],
    tilde_w: &[P],
    alpha: &P,
    max_k: usize,
) -> Result<Onset> {
    for k in 0..=max_k {
        if *alpha > threshold(&m_defect(game, policies, tilde_w, k)?) {
            return Ok(Onset::Round(k));
        }
    }
    Ok(Onset::Never)
}

/// Q(h,C) − Q(h,D) in raw payoff units, (α − (1−α)m)/(α + (1−α)m).
pub fn q_gap_formula<P: Scalar>(alpha: &P, m: &P) -> P {
    let b = (P::one() - alpha.clone()) * m.clone();
    (alpha.clone() - b.clone()) / (alpha.clone() + b)
}

fn check_prior<P: Scalar>(tilde_w: &[P], n: usize, alpha: &P) -> Result<()> {
    if tilde_w.len() != n {
        return Err(ScenarioError::Invalid(format!("{} prior weights for {} policies", tilde_w.len(), n)));
    }
    if let Some(w) = tilde_w.iter().find(|w| !w.is_positive()) {
        return Err(out_of_range("w̃", w, "policy weights must be positive"));
    }
    let s: P = tilde_w.iter().cloned().sum();
    if !s.approx_eq(&P::one(), 1e-12) {
        return Err(out_of_range("Σw̃", s, "policy weights must sum to 1"));
    }
    if *alpha < P::zero() || *alpha > P::one() {
        return Err(out_of_range("alpha", alpha, "0 ≤ α ≤ 1"));
    }
    Ok(())
}

/// The twin prior of one player: hypotheses pair a self policy with either a
/// co-player policy (weight (1−α)w̃(π)w̃(π′)) or the copying co-player
/// (weight αw̃(π)), which agrees with λ_{π,π} wherever λ_{π,π} has mass.
#[derive(Clone)]
pub struct TwinPrior<P: Scalar> {
    game: RepeatedGame<P>,
    player: usize,
    policies: Vec<NamedPolicy<P>>,
    tilde_w: Vec<P>,
    alpha: P,
}

/// Label of the copying co-player column.
pub const COPY_LABEL: &str = "copy";

pub fn twin_pd_prior<P: Scalar>(
    game: &RepeatedGame<P>,
    player: usize,
    policies: Vec<NamedPolicy<P>>,
    tilde_w: Vec<P>,
    alpha: P,
) -> Result<TwinPrior<P>> {
    check_prior(&tilde_w, policies.len(), &alpha)?;
    Ok(TwinPrior {
        game: game.clone(),
        player,
        policies,
        tilde_w,
        alpha,
    })
}

impl<P: Scalar> TwinPrior<P> {
    pub fn game(&self) -> &RepeatedGame<P> {
        &self.game
    }

    pub fn policies(&self) -> &[NamedPolicy<P>] {
        &self.policies
    }

    pub fn tilde_w(&self) -> &[P] {
        &self.tilde_w
    }

    pub fn alpha(&self) -> &P {
        &self.alpha
    }

    /// Environments: one per co-player policy, then ν_copy.
    fn environments(&self) -> Result<Vec<(String, Arc<dyn Environment<P>>)>> {
        let mut envs: Vec<(String, Arc<dyn Environment<P>>)> = Vec::new();
        for (label, pi) in &self.policies {
            envs.push((label.clone(), Arc::new(self.game.opponent_environment(self.player, pi.clone())?)));
        }
        envs.push((COPY_LABEL.to_string(), Arc::new(self.game.copy_environment(self.player)?)));
        Ok(envs)
    }

    fn weights(&self) -> Vec<Vec<P>> {
        let one_minus = P::one() - self.alpha.clone();
        self.tilde_w
            .iter()
            .map(|wi| {
                let mut row: Vec<P> =
                    self.tilde_w.iter().map(|wj| one_minus.clone() * wi.clone() * wj.clone()).collect();
                row.push(self.alpha.clone() * wi.clone());
                row
            })
            .collect()
    }

    /// The prior as a (self policy × co-player) pair class.
    pub fn pair_class(&self) -> Result<PairClass<P>> {
        Ok(PairClass::new(self.policies.clone(), self.environments()?, self.weights())?)
    }

    /// Total weight of the joint-action universe λ_{π_i,π_j}:
    /// αw̃(π_i)δ(i=j) + (1−α)w̃(π_i)w̃(π_j).
    pub fn universe_weight(&self, i: usize, j: usize) -> P {
        let mut w = (P::one() - self.alpha.clone()) * self.tilde_w[i].clone() * self.tilde_w[j].clone();
        if i == j {
            w = w + self.alpha.clone() * self.tilde_w[i].clone();
        }
        w
    }

    /// The prior over joint-action universes λ_{π,π'}: self policy π against
    /// a co-player running π', weighted by `universe_weight`. This is the
    /// form whose structural similarity measures the twin coupling.
    pub fn joint_pair_class(&self) -> Result<PairClass<P>> {
        let n = self.policies.len();
        let envs = self.environments()?.into_iter().take(n).collect();
        let weights = (0..n).map(|i| (0..n).map(|j| self.universe_weight(i, j)).collect()).collect();
        Ok(PairClass::new(self.policies.clone(), envs, weights)?)
    }

    /// The embedded agent's mixture ρ. Zero-mass own actions keep the
    /// posterior and use each hypothesis's own continuation.
    pub fn mixture(&self) -> Result<MixtureUniverse<P>> {
        Ok(self.pair_class()?.coupled_mixture(CompletionMode::Tremble)?)
    }

    /// The decoupled agent's environment mixture ξ: w(ν_copy) = α,
    /// w(ν_π) = (1−α)w̃(π).
    pub fn copy_mixture(&self) -> Result<MixtureEnvironment<P>> {
        let envs = self.environments()?;
        let n = self.policies.len();
        let mut members = Vec::new();
        let mut prior = Vec::new();
        for (k, env) in envs.into_iter().enumerate() {
            let w = if k < n {
                (P::one() - self.alpha.clone()) * self.tilde_w[k].clone()
            } else {
                self.alpha.clone()
            };
            if w.is_positive() {
                members.push(env);
                prior.push(w);
            }
        }
        Ok(MixtureEnvironment::new(members, prior)?)
    }

    /// The joint-universe prior with every policy and co-player environment
    /// blended with the uniform one at weight η, so that it is fully supported.
    pub fn smoothed_pair_class(&self, eta: &P) -> Result<PairClass<P>> {
        let sig = self.game.signature(self.player).clone();
        let keep = P::one() - eta.clone();
        let uniform_pi: Arc<dyn Policy<P>> = Arc::new(FnPolicy::uniform(sig.clone()));
        let uniform_env: Arc<dyn Environment<P>> = Arc::new(FnEnvironment::uniform(sig));
        let mut policies: Vec<NamedPolicy<P>> = Vec::new();
        for (label, pi) in &self.policies {
            let b = BlendPolicy::new(vec![(keep.clone(), pi.clone()), (eta.clone(), uniform_pi.clone())])?;
            policies.push((label.clone(), Arc::new(b)));
        }
        let mut envs: Vec<(String, Arc<dyn Environment<P>>)> = Vec::new();
        for (label, env) in self.environments()?.into_iter().take(self.policies.len()) {
            let b = BlendEnvironment::new(vec![(keep.clone(), env), (eta.clone(), uniform_env.clone())])?;
            envs.push((label, Arc::new(b)));
        }
        let n = self.policies.len();
        let weights = (0..n).map(|i| (0..n).map(|j| self.universe_weight(i, j)).collect()).collect();
        Ok(PairClass::new(policies, envs, weights)?)
    }

    /// Onset of cooperation for this prior, scanning k up to the class's
    /// stationary point `max_k`.
    pub fn onset(&self, max_k: usize) -> Result<Onset> {
        cooperation_onset(&self.game, &self.policies, &self.tilde_w, &self.alpha, max_k)
    }
}

/// The acceptance configuration: switch_policy_class(K) ∪ AllD with uniform
/// w̃, for both players. Rejects α whose onset exceeds K, since the realized
/// path would then leave the class.
#[derive(Clone)]
pub struct TwinPd<P: Scalar> {
    pub game: RepeatedGame<P>,
    pub priors: Vec<TwinPrior<P>>,
    pub k_class: usize,
    pub onset: Onset,
}

pub fn twin_pd<P: Scalar>(k_class: usize, alpha: P, rounds: usize) -> Result<TwinPd<P>> {
    if rounds == 0 {
        return Err(out_of_range("rounds", rounds, "at least one round"));
    }
    let game = RepeatedGame::new(prisoner_dilemma::<P>()?, rounds.max(k_class + 2))?;
    let mut priors = Vec::new();
    for i in 0..2 {
        let policies = switch_policy_class::<P>(game.signature(i), k_class);
        let n = policies.len();
        let w = vec![P::one() / P::from_usize(n); n];
        priors.push(twin_pd_prior(&game, i, policies, w, alpha.clone())?);
    }
    let onset = priors[0].onset(k_class + 1)?;
    if let Onset::Round(t) = onset {
        if t > k_class {
            return Err(out_of_range(
                "alpha",
                &alpha,
                &format!("onset {} exceeds the class bound K = {}", t, k_class),
            ));
        }
    }
    Ok(TwinPd {
        game,
        priors,
        k_class,
        onset,
    })
}
