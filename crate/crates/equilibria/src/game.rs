//! Finite normal-form games, joint-action indexing and mixed profiles.

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use ebw_core::{CoreError, Scalar};

use crate::error::{EquilibriumError, Result};

pub const GAME_SCHEMA: &str = "ebw-game/1";

/// Joint actions are indexed in mixed radix with player 0 most significant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Shape {
    sizes: Vec<usize>,
}

impl Shape {
    pub fn new(sizes: Vec<usize>) -> Result<Self> {
        if sizes.is_empty() || sizes.iter().any(|&n| n == 0) {
            return Err(EquilibriumError::InvalidGame("every player needs at least one action".into()));
        }
        Ok(Shape { sizes })
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn n_players(&self) -> usize {
        self.sizes.len()
    }

    pub fn n_profiles(&self) -> usize {
        self.sizes.iter().product()
    }

    pub fn index(&self, profile: &[usize]) -> usize {
        profile.iter().zip(&self.sizes).fold(0, |acc, (&a, &n)| acc * n + a)
    }

    pub fn decode(&self, mut idx: usize) -> Vec<usize> {
        let mut out = vec![0; self.sizes.len()];
        for (slot, &n) in out.iter_mut().zip(&self.sizes).rev() {
            *slot = idx % n;
            idx /= n;
        }
        out
    }

    /// Shape of the co-players of player i.
    pub fn without(&self, i: usize) -> Shape {
        let mut sizes: Vec<usize> = self.sizes.clone();
        sizes.remove(i);
        if sizes.is_empty() {
            sizes.push(1);
        }
        Shape { sizes }
    }

    /// Number of co-player profiles a^{−i}.
    pub fn n_co(&self, i: usize) -> usize {
        self.without(i).n_profiles()
    }

    /// Index of a^{−i} within the co-player profiles.
    pub fn co_index(&self, i: usize, profile: &[usize]) -> usize {
        let mut rest = profile.to_vec();
        rest.remove(i);
        if rest.is_empty() {
            return 0;
        }
        self.without(i).index(&rest)
    }

    /// Joint profile from player i's action and a co-player profile index.
    pub fn combine(&self, i: usize, a: usize, co: usize) -> Vec<usize> {
        let mut rest = if self.n_players() == 1 { Vec::new() } else { self.without(i).decode(co) };
        rest.insert(i, a);
        rest
    }
}

/// N players, action labels per player and payoffs r^i(ā).
#[derive(Clone, Debug, PartialEq)]
pub struct NormalFormGame<P: Scalar> {
    actions: Vec<Vec<String>>,
    shape: Shape,
    payoffs: Vec<Vec<P>>,
}

/// Mixed strategies, one distribution per player.
pub type MixedProfile<P> = Vec<Vec<P>>;

impl<P: Scalar> NormalFormGame<P> {
    /// `payoff(ā)` returns one payoff per player.
    pub fn new<S: AsRef<str>>(actions: &[Vec<S>], payoff: impl Fn(&[usize]) -> Vec<P>) -> Result<Self> {
        let actions: Vec<Vec<String>> =
            actions.iter().map(|row| row.iter().map(|s| s.as_ref().to_string()).collect()).collect();
        let shape = Shape::new(actions.iter().map(|a| a.len()).collect())?;
        for labels in &actions {
            for (k, l) in labels.iter().enumerate() {
                if l.is_empty() || l.contains([',', ' ', '/', ':']) || labels[..k].contains(l) {
                    return Err(EquilibriumError::InvalidGame(format!("bad action label {:?}", l)));
                }
            }
        }
        let mut payoffs = Vec::with_capacity(shape.n_profiles());
        for idx in 0..shape.n_profiles() {
            let r = payoff(&shape.decode(idx));
            if r.len() != shape.n_players() {
                return Err(EquilibriumError::InvalidGame(format!(
                    "{} payoffs for {} players",
                    r.len(),
                    shape.n_players()
                )));
            }
            payoffs.push(r);
        }
        Ok(NormalFormGame { actions, shape, payoffs })
    }

    /// Two-player game from a row-major bimatrix of (r¹, r²) pairs.
    pub fn bimatrix<S: AsRef<str>>(rows: &[S], cols: &[S], cells: Vec<Vec<(P, P)>>) -> Result<Self> {
        if cells.len() != rows.len() || cells.iter().any(|r| r.len() != cols.len()) {
            return Err(EquilibriumError::InvalidGame("bimatrix dimensions".into()));
        }
        let actions = vec![
            rows.iter().map(|s| s.as_ref().to_string()).collect::<Vec<_>>(),
            cols.iter().map(|s| s.as_ref().to_string()).collect(),
        ];
        Self::new(&actions, |p| {
            let (a, b) = cells[p[0]][p[1]].clone();
            vec![a, b]
        })
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn n_players(&self) -> usize {
        self.shape.n_players()
    }

    pub fn n_actions(&self, i: usize) -> usize {
        self.shape.sizes()[i]
    }

    pub fn actions(&self, i: usize) -> &[String] {
        &self.actions[i]
    }

    pub fn action_label(&self, i: usize, a: usize) -> &str {
        &self.actions[i][a]
    }

    pub fn action_index(&self, i: usize, label: &str) -> Result<usize> {
        self.actions[i]
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| EquilibriumError::InvalidProfile(format!("player {} has no action {:?}", i, label)))
    }

    pub fn payoff(&self, i: usize, profile: &[usize]) -> &P {
        &self.payoffs[self.shape.index(profile)][i]
    }

    pub fn profile_label(&self, profile: &[usize]) -> String {
        profile.iter().enumerate().map(|(i, &a)| self.action_label(i, a)).collect::<Vec<_>>().join(",")
    }

    pub fn parse_profile(&self, label: &str) -> Result<Vec<usize>> {
        let parts: Vec<&str> = label.split(',').map(str::trim).collect();
        if parts.len() != self.n_players() {
            return Err(EquilibriumError::InvalidProfile(format!("profile {:?}", label)));
        }
        parts.iter().enumerate().map(|(i, l)| self.action_index(i, l)).collect()
    }

    /// Label of the co-player profile with index `co` for player i.
    pub fn co_label(&self, i: usize, co: usize) -> String {
        let full = self.shape.combine(i, 0, co);
        full.iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(j, &a)| self.action_label(j, a))
            .collect::<Vec<_>>()
            .join(",")
    }

    pub fn parse_co_label(&self, i: usize, label: &str) -> Result<usize> {
        let parts: Vec<&str> = if label.is_empty() { Vec::new() } else { label.split(',').map(str::trim).collect() };
        if parts.len() + 1 != self.n_players() {
            return Err(EquilibriumError::InvalidProfile(format!("co-profile {:?}", label)));
        }
        let mut full = Vec::with_capacity(self.n_players());
        let mut it = parts.iter();
        for j in 0..self.n_players() {
            if j == i {
                full.push(0);
            } else {
                full.push(self.action_index(j, it.next().expect("length checked"))?);
            }
        }
        Ok(self.shape.co_index(i, &full))
    }

    /// Smallest and largest payoff over all players and profiles.
    pub fn payoff_range(&self) -> (P, P) {
        let mut lo = self.payoffs[0][0].clone();
        let mut hi = lo.clone();
        for r in self.payoffs.iter().flatten() {
            lo = P::min_of(lo, r.clone());
            hi = P::max_of(hi, r.clone());
        }
        (lo, hi)
    }

    /// Payoffs affinely rescaled to [0, 1] for sequential planners.
    pub fn normalized_payoff(&self, i: usize, profile: &[usize]) -> P {
        let (lo, hi) = self.payoff_range();
        if hi == lo {
            return P::zero();
        }
        (self.payoff(i, profile).clone() - lo.clone()) / (hi - lo)
    }

    pub fn pure_profile(&self, actions: &[usize]) -> Result<MixedProfile<P>> {
        if actions.len() != self.n_players() {
            return Err(EquilibriumError::InvalidProfile("one action per player".into()));
        }
        actions
            .iter()
            .enumerate()
            .map(|(i, &a)| {
                if a >= self.n_actions(i) {
                    return Err(EquilibriumError::InvalidProfile(format!("action {} of player {}", a, i)));
                }
                Ok(ebw_core::policy::point_mass(self.n_actions(i), a))
            })
            .collect()
    }

    pub fn check_profile(&self, profile: &MixedProfile<P>) -> Result<()> {
        if profile.len() != self.n_players() {
            return Err(EquilibriumError::InvalidProfile("one strategy per player".into()));
        }
        for (i, s) in profile.iter().enumerate() {
            if s.len() != self.n_actions(i) {
                return Err(EquilibriumError::InvalidProfile(format!("strategy length for player {}", i)));
            }
            ebw_core::policy::check_dist(s, true, &format!("strategy of player {}", i)).map_err(
                |e: CoreError| EquilibriumError::InvalidProfile(e.to_string()),
            )?;
        }
        Ok(())
    }

    /// Product distribution over co-player profiles of player i.
    pub fn co_distribution(&self, i: usize, profile: &MixedProfile<P>) -> Vec<P> {
        let n = self.shape.n_co(i);
        (0..n)
            .map(|co| {
                let full = self.shape.combine(i, 0, co);
                let mut p = P::one();
                for (j, &a) in full.iter().enumerate() {
                    if j != i {
                        p = p * profile[j][a].clone();
                    }
                }
                p
            })
            .collect()
    }

    /// E_{co}[r^i(a, a^{−i})] for a distribution over co-player profiles.
    pub fn expected_payoff_against(&self, i: usize, a: usize, co_dist: &[P]) -> P {
        co_dist
            .iter()
            .enumerate()
            .filter(|(_, p)| !p.is_zero())
            .map(|(co, p)| p.clone() * self.payoff(i, &self.shape.combine(i, a, co)).clone())
            .sum()
    }

    /// Expected payoff of player i under a mixed profile.
    pub fn expected_payoff(&self, i: usize, profile: &MixedProfile<P>) -> P {
        let co = self.co_distribution(i, profile);
        (0..self.n_actions(i))
            .filter(|&a| !profile[i][a].is_zero())
            .map(|a| profile[i][a].clone() * self.expected_payoff_against(i, a, &co))
            .sum()
    }

    pub fn to_doc(&self) -> GameDoc {
        let mut payoffs = IndexMap::new();
        for idx in 0..self.shape.n_profiles() {
            let p = self.shape.decode(idx);
            payoffs.insert(self.profile_label(&p), self.payoffs[idx].iter().map(|x| x.token()).collect());
        }
        GameDoc {
            schema: GAME_SCHEMA.to_string(),
            backend: P::BACKEND.to_string(),
            actions: self.actions.clone(),
            payoffs,
        }
    }

    pub fn from_doc(doc: &GameDoc) -> Result<Self> {
        if doc.schema != GAME_SCHEMA {
            return Err(EquilibriumError::InvalidGame(format!("unknown schema {:?}", doc.schema)));
        }
        let shape = Shape::new(doc.actions.iter().map(|a| a.len()).collect())?;
        let mut table = vec![None; shape.n_profiles()];
        let probe = NormalFormGame::<P> {
            actions: doc.actions.clone(),
            shape: shape.clone(),
            payoffs: Vec::new(),
        };
        for (k, v) in &doc.payoffs {
            let p = probe.parse_profile(k)?;
            let row = v.iter().map(|t| P::parse_token(t)).collect::<std::result::Result<Vec<_>, _>>()?;
            table[shape.index(&p)] = Some(row);
        }
        if table.iter().any(Option::is_none) {
            return Err(EquilibriumError::InvalidGame("payoff tensor incomplete".into()));
        }
        let table: Vec<Vec<P>> = table.into_iter().map(Option::unwrap).collect();
        Self::new(&doc.actions, |p| table[shape.index(p)].clone())
    }
}

/// Serialized game: payoff rows keyed by comma-joined action labels.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GameDoc {
    pub schema: String,
    pub backend: String,
    pub actions: Vec<Vec<String>>,
    pub payoffs: IndexMap<String, Vec<String>>,
}
