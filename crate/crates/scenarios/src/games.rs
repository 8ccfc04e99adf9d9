//! The normal-form games of the worked examples.

use ebw_core::Scalar;
use ebw_equilibria::NormalFormGame;

use crate::error::Result;

pub const DEFECT: usize = 0;
pub const COOPERATE: usize = 1;

fn cell<P: Scalar>(a: i64, b: i64) -> (P, P) {
    (P::from_ratio(a, 1), P::from_ratio(b, 1))
}

/// r(C,C) = 2, r(D,D) = 1, r(D,C) = 3, r(C,D) = 0; D is action 0.
pub fn prisoner_dilemma<P: Scalar>() -> Result<NormalFormGame<P>> {
    Ok(NormalFormGame::bimatrix(
        &["D", "C"],
        &["D", "C"],
        vec![vec![cell(1, 1), cell(3, 0)], vec![cell(0, 3), cell(2, 2)]],
    )?)
}

/// The 3×3 game in which (A, A) is a subjective but not an objective
/// embedded equilibrium.
pub fn see_not_ee_game<P: Scalar>() -> Result<NormalFormGame<P>> {
    Ok(NormalFormGame::bimatrix(
        &["A", "B", "C"],
        &["A", "B", "C"],
        vec![
            vec![cell(2, 2), cell(0, 7), cell(0, 7)],
            vec![cell(7, 0), cell(6, 1), cell(1, 6)],
            vec![cell(7, 0), cell(1, 6), cell(6, 1)],
        ],
    )?)
}

/// Off-path beliefs under which (A, A) of `see_not_ee_game` is an SEE: each
/// deviation is answered by the co-player action that punishes it.
/// Indexed `[player][own action][co-player action]`.
pub fn see_not_ee_beliefs<P: Scalar>() -> Vec<Vec<Vec<P>>> {
    let pt = |i| ebw_core::policy::point_mass(3, i);
    vec![vec![pt(0), pt(2), pt(1)], vec![pt(0), pt(1), pt(2)]]
}

#[cfg(test)]
mod tests {
    use super::*;
    use ebw_core::{q, Rational};

    #[test]
    fn pd_payoffs() {
        let g = prisoner_dilemma::<Rational>().unwrap();
        assert_eq!(g.payoff(0, &[COOPERATE, COOPERATE]), &q(2, 1));
        assert_eq!(g.payoff(1, &[COOPERATE, COOPERATE]), &q(2, 1));
        assert_eq!(g.payoff(0, &[DEFECT, COOPERATE]), &q(3, 1));
        assert_eq!(g.payoff(1, &[DEFECT, COOPERATE]), &q(0, 1));
        assert_eq!(g.payoff(0, &[DEFECT, DEFECT]), &q(1, 1));
    }

    #[test]
    fn pd_is_symmetric() {
        let g = prisoner_dilemma::<Rational>().unwrap();
        for x in 0..2 {
            for y in 0..2 {
                assert_eq!(g.payoff(0, &[x, y]), g.payoff(1, &[y, x]));
            }
        }
    }

    #[test]
    fn see_game_is_not_role_symmetric() {
        let g = see_not_ee_game::<Rational>().unwrap();
        assert_ne!(g.payoff(0, &[1, 2]), g.payoff(1, &[2, 1]));
    }

    #[test]
    fn see_game_cells() {
        let g = see_not_ee_game::<Rational>().unwrap();
        assert_eq!(g.payoff(0, &[0, 0]), &q(2, 1));
        assert_eq!((g.payoff(0, &[1, 2]), g.payoff(1, &[1, 2])), (&q(1, 1), &q(6, 1)));
    }
}
