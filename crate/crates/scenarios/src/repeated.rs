//! Two-player normal-form games repeated under perfect monitoring, seen from
//! each player: percepts are (co-player action, normalized reward).

use std::sync::Arc;

use ebw_core::{
    policy::point_mass, Alphabet, Environment, FnMultiAgentEnv, History, Percept, Policy, Scalar,
    Signature,
};
use ebw_equilibria::NormalFormGame;

use crate::error::{Result, ScenarioError};

/// A two-player game with both players' personal alphabets.
#[derive(Clone)]
pub struct RepeatedGame<P: Scalar> {
    game: NormalFormGame<P>,
    sigs: Vec<Signature>,
    /// `[player][own][co]` → percept index.
    percept_of: Vec<Vec<Vec<usize>>>,
    /// `[player][percept]` → co-player action.
    co_of: Vec<Vec<usize>>,
}

impl<P: Scalar> RepeatedGame<P> {
    pub fn new(game: NormalFormGame<P>, depth: usize) -> Result<Self> {
        if game.n_players() != 2 {
            return Err(ScenarioError::Invalid("repeated games need exactly two players".into()));
        }
        let mut sigs = Vec::new();
        let mut percept_of = Vec::new();
        let mut co_of = Vec::new();
        for i in 0..2 {
            let j = 1 - i;
            let mut labels: Vec<String> = Vec::new();
            let mut table = vec![vec![0; game.n_actions(j)]; game.n_actions(i)];
            let mut co = Vec::new();
            for (own, row) in table.iter_mut().enumerate() {
                for (b, slot) in row.iter_mut().enumerate() {
                    let mut profile = vec![0; 2];
                    profile[i] = own;
                    profile[j] = b;
                    let p = Percept::new(game.action_label(j, b), game.normalized_payoff(i, &profile))?;
                    let label = p.label();
                    *slot = match labels.iter().position(|l| *l == label) {
                        Some(e) => e,
                        None => {
                            labels.push(label);
                            co.push(b);
                            labels.len() - 1
                        }
                    };
                }
            }
            sigs.push(Signature::new(
                Alphabet::actions(game.actions(i))?,
                Alphabet::percepts(&labels)?,
                depth,
            )?);
            percept_of.push(table);
            co_of.push(co);
        }
        Ok(RepeatedGame {
            game,
            sigs,
            percept_of,
            co_of,
        })
    }

    pub fn game(&self) -> &NormalFormGame<P> {
        &self.game
    }

    pub fn signature(&self, i: usize) -> &Signature {
        &self.sigs[i]
    }

    pub fn depth(&self) -> usize {
        self.sigs[0].depth
    }

    /// Percept of player `i` after it plays `own` and the co-player plays `co`.
    pub fn percept(&self, i: usize, own: usize, co: usize) -> usize {
        self.percept_of[i][own][co]
    }

    /// Co-player action recorded in percept `e` of player `i`.
    pub fn co_action(&self, i: usize, e: usize) -> usize {
        self.co_of[i][e]
    }

    /// Reward of percept `e` of player `i`, in [0, 1].
    pub fn reward(&self, i: usize, e: usize) -> Result<P> {
        Ok(Percept::<P>::parse(self.sigs[i].percepts.label(e))?.reward)
    }

    /// The co-player's personal history matching player `i`'s history `h`.
    pub fn mirror(&self, i: usize, h: &History) -> History {
        let j = 1 - i;
        History::from_turns(
            h.turns()
                .iter()
                .map(|&(a, e)| {
                    let b = self.co_action(i, e);
                    (b, self.percept(j, b, a))
                })
                .collect(),
        )
    }

    /// Environment of player `i` when the co-player runs `opponent` on its
    /// own (mirrored) history.
    pub fn opponent_environment(&self, i: usize, opponent: Arc<dyn Policy<P>>) -> Result<OpponentEnvironment<P>> {
        self.sigs[1 - i].matches(opponent.signature())?;
        Ok(OpponentEnvironment {
            game: Arc::new(self.clone()),
            i,
            opponent,
        })
    }

    /// ν_copy for player `i`: the co-player repeats the action just taken.
    pub fn copy_environment(&self, i: usize) -> Result<CopyEnvironment<P>> {
        if self.game.actions(0) != self.game.actions(1) {
            return Err(ScenarioError::Invalid("copying needs identical action sets".into()));
        }
        Ok(CopyEnvironment {
            game: Arc::new(self.clone()),
            i,
        })
    }

    /// The repeated game as a two-agent environment with deterministic
    /// joint percepts.
    pub fn multi_agent_env(&self) -> Result<FnMultiAgentEnv<P>> {
        let me = self.clone();
        Ok(FnMultiAgentEnv::new(self.sigs.clone(), move |_, acts| {
            vec![(vec![me.percept(0, acts[0], acts[1]), me.percept(1, acts[1], acts[0])], P::one())]
        })?)
    }
}

/// Player `i`'s environment given the co-player's policy.
pub struct OpponentEnvironment<P: Scalar> {
    game: Arc<RepeatedGame<P>>,
    i: usize,
    opponent: Arc<dyn Policy<P>>,
}

impl<P: Scalar> Environment<P> for OpponentEnvironment<P> {
    fn signature(&self) -> &Signature {
        self.game.signature(self.i)
    }

    fn dist(&self, h: &History, a: usize) -> ebw_core::Result<Vec<P>> {
        self.signature().check_extend(h.len())?;
        self.signature().actions.check(a)?;
        let d = self.opponent.dist(&self.game.mirror(self.i, h))?;
        let mut out = vec![P::zero(); self.signature().n_percepts()];
        for (b, p) in d.into_iter().enumerate() {
            let e = self.game.percept(self.i, a, b);
            out[e] = out[e].clone() + p;
        }
        Ok(out)
    }

    fn state_key(&self, h: &History) -> Option<u64> {
        self.opponent.state_key(&self.game.mirror(self.i, h))
    }
}

/// Player `i`'s environment in which the co-player copies each action.
pub struct CopyEnvironment<P: Scalar> {
    game: Arc<RepeatedGame<P>>,
    i: usize,
}

impl<P: Scalar> Environment<P> for CopyEnvironment<P> {
    fn signature(&self) -> &Signature {
        self.game.signature(self.i)
    }

    fn dist(&self, h: &History, a: usize) -> ebw_core::Result<Vec<P>> {
        self.signature().check_extend(h.len())?;
        self.signature().actions.check(a)?;
        Ok(point_mass(self.signature().n_percepts(), self.game.percept(self.i, a, a)))
    }

    fn state_key(&self, _h: &History) -> Option<u64> {
        Some(0)
    }
}
