//! A normal-form game as a depth-one sequential problem for each player.
//!
//! Player i's percept is the realized joint action, labelled "A.B:r" with the
//! payoff rescaled to [0, 1]; γ = 0 and H = 1, so the planner's slack is zero.

use std::sync::Arc;

use ebw_core::{
    interact, Alphabet, Environment, FnEnvironment, FnPolicy, History, Percept, Policy, Scalar, Signature, Universe,
};
use ebw_planning::{DiscountedTask, PlanBudget};

use crate::dependency::DependencyDistribution;
use crate::error::{EquilibriumError, Result};
use crate::game::{MixedProfile, NormalFormGame};
use crate::sequential::{check_ee, check_see, CheckOptions, EePlayer, EmbeddedPlayer};
use crate::verdict::Verdict;

/// Player i's view of a one-shot game.
pub struct OneShot<P: Scalar> {
    game: NormalFormGame<P>,
    player: usize,
    sig: Signature,
    task: DiscountedTask<P>,
}

impl<P: Scalar> OneShot<P> {
    pub fn new(game: &NormalFormGame<P>, player: usize) -> Result<Self> {
        if player >= game.n_players() {
            return Err(EquilibriumError::InvalidProfile(format!("no player {}", player)));
        }
        let shape = game.shape();
        let percepts = (0..shape.n_profiles())
            .map(|idx| {
                let p = shape.decode(idx);
                let obs = game.profile_label(&p).replace(',', ".");
                Percept::new(&obs, game.normalized_payoff(player, &p))
            })
            .collect::<std::result::Result<Vec<_>, _>>()?;
        let alphabet = Alphabet::from_percepts(&percepts)?;
        let sig = Signature::new(Alphabet::actions(game.actions(player))?, alphabet.clone(), 1)?;
        let task = DiscountedTask::from_percepts(P::zero(), &alphabet)?;
        Ok(OneShot {
            game: game.clone(),
            player,
            sig,
            task,
        })
    }

    pub fn signature(&self) -> &Signature {
        &self.sig
    }

    pub fn task(&self) -> &DiscountedTask<P> {
        &self.task
    }

    pub fn budget() -> PlanBudget {
        PlanBudget::horizon(1).expect("positive horizon")
    }

    /// Environment answering a' with `rows[a']` over co-player profiles.
    pub fn environment(&self, rows: Vec<Vec<P>>) -> Result<Arc<dyn Environment<P>>> {
        let i = self.player;
        let shape = self.game.shape().clone();
        if rows.len() != self.game.n_actions(i) || rows.iter().any(|r| r.len() != shape.n_co(i)) {
            return Err(EquilibriumError::InvalidInput(format!("belief rows for player {}", i)));
        }
        for r in &rows {
            ebw_core::policy::check_dist(r, true, &format!("belief row of player {}", i))?;
        }
        Ok(Arc::new(FnEnvironment::new(self.sig.clone(), move |_, a| {
            let mut d = vec![P::zero(); shape.n_profiles()];
            for (co, p) in rows[a].iter().enumerate() {
                d[shape.index(&shape.combine(i, a, co))] = p.clone();
            }
            d
        })))
    }

    pub fn policy(&self, strategy: &[P]) -> Arc<dyn Policy<P>> {
        Arc::new(FnPolicy::constant(self.sig.clone(), strategy.to_vec()))
    }

    /// (μ^i)^{π^i}: undefined off the profile's support.
    pub fn ground_truth(&self, profile: &MixedProfile<P>) -> Result<Arc<dyn Universe<P>>> {
        let co = self.game.co_distribution(self.player, profile);
        let env = self.environment(vec![co; self.game.n_actions(self.player)])?;
        Ok(Arc::new(interact(self.policy(&profile[self.player]), env)?))
    }

    /// Beliefs ρ^i(a^{−i} | a') for every own action, including off-path ones.
    pub fn beliefs(&self, profile: &MixedProfile<P>, rows: Vec<Vec<P>>) -> Result<Arc<dyn Universe<P>>> {
        let env = self.environment(rows)?;
        Ok(Arc::new(interact(self.policy(&profile[self.player]), env)?.with_factor_completion()))
    }

    /// The completion q(a^{−i} | a') read from a dependency distribution.
    pub fn completion(&self, dep: &DependencyDistribution<P>) -> Result<Arc<dyn Universe<P>>> {
        let i = self.player;
        let rows = (0..self.game.n_actions(i)).map(|a| dep.completion(i, a).to_vec()).collect();
        let env = self.environment(rows)?;
        let uniform: Arc<dyn Policy<P>> = Arc::new(FnPolicy::uniform(self.sig.clone()));
        Ok(Arc::new(interact(uniform, env)?.with_factor_completion()))
    }
}

/// SEE of a one-shot profile with explicit beliefs: `beliefs[i][a']` is
/// player i's distribution over co-player profiles after playing a'.
pub fn check_see_one_shot<P: Scalar>(
    game: &NormalFormGame<P>,
    profile: &MixedProfile<P>,
    beliefs: &[Vec<Vec<P>>],
    delta_br: &P,
) -> Result<Verdict> {
    game.check_profile(profile)?;
    if beliefs.len() != game.n_players() {
        return Err(EquilibriumError::InvalidInput("one belief table per player".into()));
    }
    let players = (0..game.n_players())
        .map(|i| {
            let view = OneShot::new(game, i)?;
            Ok(EmbeddedPlayer {
                policy: view.policy(&profile[i]),
                model: view.beliefs(profile, beliefs[i].clone())?,
                truth: view.ground_truth(profile)?,
                task: view.task().clone(),
                at: History::empty(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let opts = CheckOptions {
        delta_br: delta_br.clone(),
        k_scan: 1,
    };
    check_see(&players, &OneShot::<P>::budget(), &opts)
}

/// The EE players of a one-shot profile completed by a dependency distribution.
pub fn ee_players_one_shot<P: Scalar>(
    game: &NormalFormGame<P>,
    profile: &MixedProfile<P>,
    dep: &DependencyDistribution<P>,
) -> Result<Vec<EePlayer<P>>> {
    game.check_profile(profile)?;
    (0..game.n_players())
        .map(|i| {
            let view = OneShot::new(game, i)?;
            Ok(EePlayer {
                policy: view.policy(&profile[i]),
                truth: view.ground_truth(profile)?,
                completion: view.completion(dep)?,
                task: view.task().clone(),
                at: History::empty(),
            })
        })
        .collect()
}

/// EE of a one-shot profile, off-path conditionals from `dep`.
pub fn check_ee_one_shot<P: Scalar>(
    game: &NormalFormGame<P>,
    profile: &MixedProfile<P>,
    dep: &DependencyDistribution<P>,
    eps_br: &P,
) -> Result<Verdict> {
    let players = ee_players_one_shot(game, profile, dep)?;
    let opts = CheckOptions {
        delta_br: eps_br.clone(),
        k_scan: 1,
    };
    check_ee(&players, &OneShot::<P>::budget(), &opts)
}
