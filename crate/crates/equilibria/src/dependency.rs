//! Dependency distributions p(ā) with completed conditionals p(a^{−i} | a^i),
//! and the dependency equilibrium check.

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use num::{Signed, Zero};

use ebw_core::{Rational, Scalar};

use crate::error::{EquilibriumError, Result};
use crate::game::{MixedProfile, NormalFormGame, Shape};
use crate::verdict::{Tolerances, Verdict, Witness};

pub const DEPENDENCY_SCHEMA: &str = "ebw-dependency/1";

const FLOAT_TOL: f64 = 1e-9;

fn same<P: Scalar>(a: &P, b: &P) -> bool {
    if P::EXACT {
        a == b
    } else {
        a.approx_eq(b, FLOAT_TOL)
    }
}

/// Joint p(ā) plus, per player and own action, a full conditional over
/// co-player profiles that agrees with p wherever p(a^i) > 0.
#[derive(Clone, Debug, PartialEq)]
pub struct DependencyDistribution<P: Scalar> {
    shape: Shape,
    joint: Vec<P>,
    completions: Vec<Vec<Vec<P>>>,
}

impl<P: Scalar> DependencyDistribution<P> {
    pub fn new(game: &NormalFormGame<P>, joint: Vec<P>, completions: Vec<Vec<Vec<P>>>) -> Result<Self> {
        let shape = game.shape().clone();
        if joint.len() != shape.n_profiles() {
            return Err(EquilibriumError::InconsistentCompletion("joint has the wrong length".into()));
        }
        ebw_core::policy::check_dist(&joint, true, &"dependency distribution")?;
        if completions.len() != shape.n_players() {
            return Err(EquilibriumError::InconsistentCompletion("one completion table per player".into()));
        }
        let dep = DependencyDistribution { shape, joint, completions };
        for i in 0..dep.shape.n_players() {
            if dep.completions[i].len() != dep.shape.sizes()[i] {
                return Err(EquilibriumError::InconsistentCompletion(format!("player {} needs a row per action", i)));
            }
            let marginal = dep.marginal(i);
            for a in 0..dep.shape.sizes()[i] {
                let row = &dep.completions[i][a];
                if row.len() != dep.shape.n_co(i) {
                    return Err(EquilibriumError::InconsistentCompletion(format!(
                        "row ({}, {}) has the wrong length",
                        i, a
                    )));
                }
                ebw_core::policy::check_dist(row, true, &format!("completion row ({}, {})", i, a))
                    .map_err(|e| EquilibriumError::InconsistentCompletion(e.to_string()))?;
                if marginal[a].is_positive() {
                    let own = dep.conditional(i, a, &marginal[a]);
                    if !own.iter().zip(row).all(|(x, y)| same(x, y)) {
                        return Err(EquilibriumError::InconsistentCompletion(format!(
                            "row for player {} action {} disagrees with the joint",
                            i, game.action_label(i, a)
                        )));
                    }
                }
            }
        }
        Ok(dep)
    }

    /// The joint's own conditionals on its support, `off_support(i, a)` elsewhere.
    pub fn from_joint(
        game: &NormalFormGame<P>,
        joint: Vec<P>,
        off_support: impl Fn(usize, usize) -> Vec<P>,
    ) -> Result<Self> {
        let shape = game.shape().clone();
        if joint.len() != shape.n_profiles() {
            return Err(EquilibriumError::InconsistentCompletion("joint has the wrong length".into()));
        }
        let probe = DependencyDistribution {
            shape: shape.clone(),
            joint: joint.clone(),
            completions: Vec::new(),
        };
        let completions = (0..shape.n_players())
            .map(|i| {
                let m = probe.marginal(i);
                (0..shape.sizes()[i])
                    .map(|a| {
                        if m[a].is_positive() {
                            probe.conditional(i, a, &m[a])
                        } else {
                            off_support(i, a)
                        }
                    })
                    .collect()
            })
            .collect();
        Self::new(game, joint, completions)
    }

    /// Decoupled distribution of a mixed profile: every row is the co-players' product.
    pub fn product(game: &NormalFormGame<P>, profile: &MixedProfile<P>) -> Result<Self> {
        game.check_profile(profile)?;
        let shape = game.shape();
        let joint = (0..shape.n_profiles())
            .map(|idx| {
                let p = shape.decode(idx);
                p.iter().enumerate().fold(P::one(), |acc, (j, &a)| acc * profile[j][a].clone())
            })
            .collect();
        let completions = (0..shape.n_players())
            .map(|i| {
                let co = game.co_distribution(i, profile);
                vec![co; shape.sizes()[i]]
            })
            .collect();
        Self::new(game, joint, completions)
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn joint(&self) -> &[P] {
        &self.joint
    }

    pub fn completion(&self, i: usize, a: usize) -> &[P] {
        &self.completions[i][a]
    }

    pub fn completions(&self) -> &[Vec<Vec<P>>] {
        &self.completions
    }

    /// Marginal p(a^i).
    pub fn marginal(&self, i: usize) -> Vec<P> {
        let mut m = vec![P::zero(); self.shape.sizes()[i]];
        for (idx, p) in self.joint.iter().enumerate() {
            let a = self.shape.decode(idx)[i];
            m[a] = m[a].clone() + p.clone();
        }
        m
    }

    fn conditional(&self, i: usize, a: usize, marginal: &P) -> Vec<P> {
        (0..self.shape.n_co(i))
            .map(|co| self.joint[self.shape.index(&self.shape.combine(i, a, co))].clone() / marginal.clone())
            .collect()
    }

    pub fn to_doc(&self, game: &NormalFormGame<P>) -> DependencyDoc {
        let mut joint = IndexMap::new();
        for (idx, p) in self.joint.iter().enumerate() {
            joint.insert(game.profile_label(&self.shape.decode(idx)), p.token());
        }
        let completions = (0..self.shape.n_players())
            .map(|i| {
                let mut rows = IndexMap::new();
                for a in 0..self.shape.sizes()[i] {
                    let mut row = IndexMap::new();
                    for (co, p) in self.completions[i][a].iter().enumerate() {
                        row.insert(game.co_label(i, co), p.token());
                    }
                    rows.insert(game.action_label(i, a).to_string(), row);
                }
                rows
            })
            .collect();
        DependencyDoc {
            schema: DEPENDENCY_SCHEMA.to_string(),
            backend: P::BACKEND.to_string(),
            joint,
            completions,
        }
    }

    pub fn from_doc(game: &NormalFormGame<P>, doc: &DependencyDoc) -> Result<Self> {
        if doc.schema != DEPENDENCY_SCHEMA {
            return Err(EquilibriumError::InvalidInput(format!("unknown schema {:?}", doc.schema)));
        }
        let shape = game.shape();
        let mut joint = vec![P::zero(); shape.n_profiles()];
        for (k, v) in &doc.joint {
            joint[shape.index(&game.parse_profile(k)?)] = P::parse_token(v)?;
        }
        if doc.completions.len() != shape.n_players() {
            return Err(EquilibriumError::InconsistentCompletion("one completion table per player".into()));
        }
        let mut completions = Vec::new();
        for (i, rows) in doc.completions.iter().enumerate() {
            let mut table = vec![vec![P::zero(); shape.n_co(i)]; shape.sizes()[i]];
            for (a_label, row) in rows {
                let a = game.action_index(i, a_label)?;
                for (co_label, v) in row {
                    table[a][game.parse_co_label(i, co_label)?] = P::parse_token(v)?;
                }
            }
            completions.push(table);
        }
        Self::new(game, joint, completions)
    }
}

/// Serialized dependency distribution; zero entries may be omitted.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DependencyDoc {
    pub schema: String,
    pub backend: String,
    pub joint: IndexMap<String, String>,
    /// Per player: own action label → co-player profile label → probability.
    pub completions: Vec<IndexMap<String, IndexMap<String, String>>>,
}

/// A polynomial c₀ + c₁ε + c₂ε² + … in the sequence parameter ε_r → 0.
#[derive(Clone, Debug, PartialEq)]
pub struct Polynomial(pub Vec<Rational>);

impl Polynomial {
    pub fn constant(c: Rational) -> Self {
        Polynomial(vec![c])
    }

    /// Index of the lowest nonzero coefficient.
    pub fn order(&self) -> Option<usize> {
        self.0.iter().position(|c| !c.is_zero())
    }

    pub fn coeff(&self, k: usize) -> Rational {
        self.0.get(k).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn eval(&self, eps: &Rational) -> Rational {
        self.0.iter().rev().fold(Rational::zero(), |acc, c| acc * eps.clone() + c.clone())
    }
}


/// A sequence p_r(ā) whose entries are polynomials in ε_r → 0. Its limit
/// conditionals are read off the lowest-order terms of each own-action row.
#[derive(Clone, Debug, PartialEq)]
pub struct ParametricJoint {
    shape: Shape,
    entries: Vec<Polynomial>,
}

impl ParametricJoint {
    /// Unlisted profiles have p_r = 0.
    pub fn new(game: &NormalFormGame<Rational>, entries: Vec<(Vec<usize>, Polynomial)>) -> Result<Self> {
        let shape = game.shape().clone();
        let mut table = vec![Polynomial(Vec::new()); shape.n_profiles()];
        for (p, poly) in entries {
            if p.len() != shape.n_players() || p.iter().zip(shape.sizes()).any(|(&a, &n)| a >= n) {
                return Err(EquilibriumError::InvalidProfile(format!("{:?}", p)));
            }
            table[shape.index(&p)] = poly;
        }
        let width = table.iter().map(|p| p.0.len()).max().unwrap_or(0);
        for k in 0..width {
            let s: Rational = table.iter().map(|p| p.coeff(k)).sum();
            let want = if k == 0 { Rational::from_ratio(1, 1) } else { Rational::zero() };
            if s != want {
                return Err(EquilibriumError::InconsistentCompletion(
                    "p_r must sum to one for every ε_r".into(),
                ));
            }
        }
        for p in &table {
            if let Some(k) = p.order() {
                if p.coeff(k).is_negative() {
                    return Err(EquilibriumError::InconsistentCompletion(
                        "p_r must be nonnegative for small ε_r".into(),
                    ));
                }
            }
        }
        let pj = ParametricJoint { shape, entries: table };
        for i in 0..pj.shape.n_players() {
            for a in 0..pj.shape.sizes()[i] {
                if pj.row(i, a).iter().all(|p| p.order().is_none()) {
                    return Err(EquilibriumError::InconsistentCompletion(format!(
                        "p_r never reaches action {} of player {}",
                        game.action_label(i, a),
                        i
                    )));
                }
            }
        }
        Ok(pj)
    }

    fn row(&self, i: usize, a: usize) -> Vec<&Polynomial> {
        (0..self.shape.n_co(i))
            .map(|co| &self.entries[self.shape.index(&self.shape.combine(i, a, co))])
            .collect()
    }

    /// p_r at a concrete ε_r.
    pub fn at(&self, eps: &Rational) -> Vec<Rational> {
        self.entries.iter().map(|p| p.eval(eps)).collect()
    }

    /// lim_r p_r(a^{−i} | a^i), exactly.
    pub fn limit_conditional(&self, i: usize, a: usize) -> Vec<Rational> {
        let row = self.row(i, a);
        let k = row.iter().filter_map(|p| p.order()).min().expect("every row is reachable");
        let lead: Vec<Rational> = row.iter().map(|p| p.coeff(k)).collect();
        let total: Rational = lead.iter().cloned().sum();
        lead.into_iter().map(|c| c / total.clone()).collect()
    }

    /// The limit joint with the limit conditionals as its completion.
    pub fn limit(&self, game: &NormalFormGame<Rational>) -> Result<DependencyDistribution<Rational>> {
        let joint = self.entries.iter().map(|p| p.coeff(0)).collect();
        let completions = (0..self.shape.n_players())
            .map(|i| (0..self.shape.sizes()[i]).map(|a| self.limit_conditional(i, a)).collect())
            .collect();
        DependencyDistribution::new(game, joint, completions)
    }
}

/// Every on-support action of every player maximizes E_{p(a^{−i}|a^i)}[r^i]
/// up to `eps`.
pub fn check_dependency_eq<P: Scalar>(
    game: &NormalFormGame<P>,
    dep: &DependencyDistribution<P>,
    eps: &P,
) -> Result<Verdict> {
    if dep.shape() != game.shape() {
        return Err(EquilibriumError::InconsistentCompletion("shape differs from the game".into()));
    }
    let mut witnesses = Vec::new();
    for i in 0..game.n_players() {
        let utils: Vec<P> = (0..game.n_actions(i))
            .map(|a| game.expected_payoff_against(i, a, dep.completion(i, a)))
            .collect();
        let best = ebw_planning::argmax_lowest(&utils);
        for (a, m) in dep.marginal(i).iter().enumerate() {
            if !m.is_positive() {
                continue;
            }
            let gap = utils[best].clone() - utils[a].clone();
            if gap > *eps {
                witnesses.push(Witness::deviation(
                    i,
                    format!("on {}", game.action_label(i, a)),
                    game.action_label(i, best),
                    &gap,
                ));
            }
        }
    }
    Ok(Verdict::new("dependency", witnesses, Tolerances::eps(eps)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use ebw_core::q;

    fn pd() -> NormalFormGame<Rational> {
        let r = |a: i64, b: i64| (q(a, 1), q(b, 1));
        NormalFormGame::bimatrix(
            &["D", "C"],
            &["D", "C"],
            vec![vec![r(1, 1), r(3, 0)], vec![r(0, 3), r(2, 2)]],
        )
        .unwrap()
    }

    #[test]
    fn completion_must_match_joint_on_support() {
        let g = pd();
        let joint = vec![q(0, 1), q(0, 1), q(0, 1), q(1, 1)];
        let good = vec![vec![vec![q(1, 1), q(0, 1)], vec![q(0, 1), q(1, 1)]]; 2];
        assert!(DependencyDistribution::new(&g, joint.clone(), good).is_ok());
        let bad = vec![vec![vec![q(1, 1), q(0, 1)], vec![q(1, 1), q(0, 1)]]; 2];
        assert!(matches!(
            DependencyDistribution::new(&g, joint, bad),
            Err(EquilibriumError::InconsistentCompletion(_))
        ));
    }

    #[test]
    fn parametric_limit_reads_lowest_order() {
        let g = pd();
        let pj = ParametricJoint::new(
            &g,
            vec![
                (vec![1, 1], Polynomial(vec![q(1, 1), q(-1, 1)])),
                (vec![0, 0], Polynomial(vec![q(0, 1), q(1, 1)])),
            ],
        )
        .unwrap();
        assert_eq!(pj.limit_conditional(0, 0), vec![q(1, 1), q(0, 1)]);
        assert_eq!(pj.limit_conditional(0, 1), vec![q(0, 1), q(1, 1)]);
        assert_eq!(pj.at(&q(1, 10))[0], q(1, 10));
        let dep = pj.limit(&g).unwrap();
        assert_eq!(dep.marginal(0), vec![q(0, 1), q(1, 1)]);
    }

    #[test]
    fn parametric_rejects_improper_sequences() {
        let g = pd();
        let short = ParametricJoint::new(&g, vec![(vec![1, 1], Polynomial(vec![q(1, 1), q(-1, 1)]))]);
        assert!(short.is_err());
        let unreached = ParametricJoint::new(&g, vec![(vec![1, 1], Polynomial::constant(q(1, 1)))]);
        assert!(unreached.is_err());
    }

    #[test]
    fn document_round_trip() {
        let g = pd();
        let half = vec![q(1, 2), q(1, 2)];
        let dep = DependencyDistribution::product(&g, &vec![half.clone(), half]).unwrap();
        let doc = dep.to_doc(&g);
        let text = serde_json::to_string(&doc).unwrap();
        let back = DependencyDistribution::from_doc(&g, &serde_json::from_str(&text).unwrap()).unwrap();
        assert_eq!(back, dep);
    }
}
