#![allow(dead_code)]

use ebw_core::{q, Rational};
use ebw_equilibria::NormalFormGame;

pub fn r(n: i64) -> Rational {
    q(n, 1)
}

/// Prisoner's dilemma with D = 0, C = 1.
pub fn pd() -> NormalFormGame<Rational> {
    let c = |a: i64, b: i64| (r(a), r(b));
    NormalFormGame::bimatrix(&["D", "C"], &["D", "C"], vec![vec![c(1, 1), c(3, 0)], vec![c(0, 3), c(2, 2)]]).unwrap()
}

/// The 3×3 game whose profile (A, A) is an SEE but not an EE.
pub fn see_game() -> NormalFormGame<Rational> {
    let c = |a: i64, b: i64| (r(a), r(b));
    NormalFormGame::bimatrix(
        &["A", "B", "C"],
        &["A", "B", "C"],
        vec![
            vec![c(2, 2), c(0, 7), c(0, 7)],
            vec![c(7, 0), c(6, 1), c(1, 6)],
            vec![c(7, 0), c(1, 6), c(6, 1)],
        ],
    )
    .unwrap()
}

pub fn pennies() -> NormalFormGame<Rational> {
    let w = |a: i64| (r(a), r(-a));
    NormalFormGame::bimatrix(&["H", "T"], &["H", "T"], vec![vec![w(1), w(-1)], vec![w(-1), w(1)]]).unwrap()
}

pub fn point(n: usize, i: usize) -> Vec<Rational> {
    ebw_core::policy::point_mass(n, i)
}

/// Beliefs of the SEE-not-EE example: after a deviation each player expects
/// the co-player response that punishes it.
pub fn see_beliefs() -> Vec<Vec<Vec<Rational>>> {
    // Player 1: A → A (on path), B → C, C → B. Player 2: A → A, B → B, C → C.
    vec![
        vec![point(3, 0), point(3, 2), point(3, 1)],
        vec![point(3, 0), point(3, 1), point(3, 2)],
    ]
}
