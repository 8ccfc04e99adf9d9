//! Nash and subjective Nash equilibria of normal-form games.

use ebw_core::Scalar;

use crate::error::{EquilibriumError, Result};
use crate::game::{MixedProfile, NormalFormGame};
use crate::verdict::{Tolerances, Verdict, Witness};

/// Best pure reply of player i to a co-player distribution: (action, value).
pub fn best_reply<P: Scalar>(game: &NormalFormGame<P>, i: usize, co_dist: &[P]) -> (usize, P) {
    let mut best = (0, game.expected_payoff_against(i, 0, co_dist));
    for a in 1..game.n_actions(i) {
        let v = game.expected_payoff_against(i, a, co_dist);
        if v > best.1 {
            best = (a, v);
        }
    }
    best
}

/// Every unilateral deviation gains at most `eps`.
pub fn check_nash<P: Scalar>(game: &NormalFormGame<P>, profile: &MixedProfile<P>, eps: &P) -> Result<Verdict> {
    game.check_profile(profile)?;
    let mut witnesses = Vec::new();
    for i in 0..game.n_players() {
        let co = game.co_distribution(i, profile);
        let value = game.expected_payoff(i, profile);
        let (a, best) = best_reply(game, i, &co);
        let gap = best - value;
        if gap > *eps {
            witnesses.push(Witness::deviation(i, "", game.action_label(i, a), &gap));
        }
    }
    Ok(Verdict::new("nash", witnesses, Tolerances::eps(eps)))
}

/// Best response to action-independent beliefs ξ^i over co-player profiles,
/// with the beliefs uncontradicted by the profile's own play.
pub fn check_subjective_nash<P: Scalar>(
    game: &NormalFormGame<P>,
    profile: &MixedProfile<P>,
    beliefs: &[Vec<P>],
    eps: &P,
) -> Result<Verdict> {
    game.check_profile(profile)?;
    if beliefs.len() != game.n_players() {
        return Err(EquilibriumError::InvalidInput("one belief per player".into()));
    }
    let mut witnesses = Vec::new();
    for i in 0..game.n_players() {
        let xi = &beliefs[i];
        if xi.len() != game.shape().n_co(i) {
            return Err(EquilibriumError::InvalidInput(format!("belief length for player {}", i)));
        }
        let truth = game.co_distribution(i, profile);
        let dist: P = xi.iter().zip(&truth).map(|(x, t)| (x.clone() - t.clone()).abs_val()).sum::<P>()
            / P::from_ratio(2, 1);
        if dist.is_positive() {
            witnesses.push(Witness::belief(i, "", &dist));
        }
        let (a, best) = best_reply(game, i, xi);
        let value: P = (0..game.n_actions(i))
            .map(|b| profile[i][b].clone() * game.expected_payoff_against(i, b, xi))
            .sum();
        let gap = best - value;
        if gap > *eps {
            witnesses.push(Witness::deviation(i, "", game.action_label(i, a), &gap));
        }
    }
    Ok(Verdict::new("subjective-nash", witnesses, Tolerances::eps(eps)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use ebw_core::{q, Rational};

    fn pennies() -> NormalFormGame<Rational> {
        let w = |a: i64| (q(a, 1), q(-a, 1));
        NormalFormGame::bimatrix(&["H", "T"], &["H", "T"], vec![vec![w(1), w(-1)], vec![w(-1), w(1)]]).unwrap()
    }

    #[test]
    fn pennies_pure_profile_fails() {
        let g = pennies();
        let v = check_nash(&g, &g.pure_profile(&[0, 0]).unwrap(), &q(0, 1)).unwrap();
        assert!(!v.pass);
        assert_eq!(v.witnesses[0].player(), Some(1));
    }

    #[test]
    fn wrong_beliefs_are_contradicted() {
        let g = pennies();
        let half = vec![q(1, 2), q(1, 2)];
        let profile = vec![half.clone(), half.clone()];
        let ok = check_subjective_nash(&g, &profile, &[half.clone(), half.clone()], &q(0, 1)).unwrap();
        assert!(ok.pass);
        let skew = vec![q(3, 4), q(1, 4)];
        let bad = check_subjective_nash(&g, &profile, &[skew, half], &q(0, 1)).unwrap();
        assert!(!bad.pass);
    }
}
