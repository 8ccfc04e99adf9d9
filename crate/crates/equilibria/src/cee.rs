//! Correlation devices, correlated embedded equilibria and the obedient
//! construction from a dependency equilibrium.

use ebw_core::Scalar;

use crate::dependency::DependencyDistribution;
use crate::error::{EquilibriumError, Result};
use crate::game::{MixedProfile, NormalFormGame, Shape};
use crate::verdict::{Tolerances, Verdict, Witness};

/// Private message alphabets and a joint distribution p(m̄) over them.
#[derive(Clone, Debug, PartialEq)]
pub struct CorrelationDevice<P: Scalar> {
    messages: Vec<Vec<String>>,
    shape: Shape,
    joint: Vec<P>,
}

impl<P: Scalar> CorrelationDevice<P> {
    pub fn new(messages: Vec<Vec<String>>, joint: Vec<P>) -> Result<Self> {
        let shape = Shape::new(messages.iter().map(|m| m.len()).collect())
            .map_err(|e| EquilibriumError::InvalidDevice(e.to_string()))?;
        if joint.len() != shape.n_profiles() {
            return Err(EquilibriumError::InvalidDevice("joint has the wrong length".into()));
        }
        ebw_core::policy::check_dist(&joint, true, &"device distribution")
            .map_err(|e| EquilibriumError::InvalidDevice(e.to_string()))?;
        Ok(CorrelationDevice { messages, shape, joint })
    }

    /// One message per player, always sent.
    pub fn trivial(n_players: usize) -> Self {
        Self::new(vec![vec!["m".to_string()]; n_players], vec![P::one()]).expect("trivial device is valid")
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn messages(&self, i: usize) -> &[String] {
        &self.messages[i]
    }

    pub fn joint(&self) -> &[P] {
        &self.joint
    }

    pub fn marginal(&self, i: usize) -> Vec<P> {
        let mut m = vec![P::zero(); self.shape.sizes()[i]];
        for (idx, p) in self.joint.iter().enumerate() {
            let k = self.shape.decode(idx)[i];
            m[k] = m[k].clone() + p.clone();
        }
        m
    }
}

/// q(a^{−i} | a'^i, m̄): indexed by player, joint message, own action.
pub type CorrelatedCompletion<P> = Vec<Vec<Vec<Vec<P>>>>;

/// Policies π^i(a^i | m^i): indexed by player, own message, action.
pub type MessagePolicies<P> = Vec<Vec<Vec<P>>>;

/// Obedient construction: messages are recommended actions drawn from p,
/// policies follow them, and q reuses the dependency completion.
pub fn de_to_cee<P: Scalar>(
    game: &NormalFormGame<P>,
    dep: &DependencyDistribution<P>,
) -> Result<(CorrelationDevice<P>, MessagePolicies<P>, CorrelatedCompletion<P>)> {
    let n = game.n_players();
    let messages = (0..n).map(|i| game.actions(i).to_vec()).collect();
    let device = CorrelationDevice::new(messages, dep.joint().to_vec())?;
    let policies = (0..n)
        .map(|i| {
            (0..game.n_actions(i))
                .map(|m| ebw_core::policy::point_mass(game.n_actions(i), m))
                .collect()
        })
        .collect();
    let q = (0..n)
        .map(|i| {
            let rows: Vec<Vec<P>> = (0..game.n_actions(i)).map(|a| dep.completion(i, a).to_vec()).collect();
            vec![rows; device.shape().n_profiles()]
        })
        .collect();
    Ok((device, policies, q))
}

/// A mixed profile as a trivial device with the decoupled completion.
pub fn nash_to_cee<P: Scalar>(
    game: &NormalFormGame<P>,
    profile: &MixedProfile<P>,
) -> Result<(CorrelationDevice<P>, MessagePolicies<P>, CorrelatedCompletion<P>)> {
    game.check_profile(profile)?;
    let n = game.n_players();
    let device = CorrelationDevice::trivial(n);
    let policies = profile.iter().map(|s| vec![s.clone()]).collect();
    let q = (0..n)
        .map(|i| vec![vec![game.co_distribution(i, profile); game.n_actions(i)]])
        .collect();
    Ok((device, policies, q))
}

/// Per player and message with p(m^i) > 0, the policy's expected reward
/// against the q-completed ground truth is within `eps` of the best action's.
pub fn check_cee<P: Scalar>(
    game: &NormalFormGame<P>,
    policies: &MessagePolicies<P>,
    device: &CorrelationDevice<P>,
    q: &CorrelatedCompletion<P>,
    eps: &P,
) -> Result<Verdict> {
    let n = game.n_players();
    let ds = device.shape();
    if ds.n_players() != n || policies.len() != n || q.len() != n {
        return Err(EquilibriumError::InvalidDevice("player counts differ".into()));
    }
    for i in 0..n {
        if policies[i].len() != ds.sizes()[i] {
            return Err(EquilibriumError::InvalidProfile(format!("player {} needs a policy row per message", i)));
        }
        for row in &policies[i] {
            if row.len() != game.n_actions(i) {
                return Err(EquilibriumError::InvalidProfile(format!("policy row length for player {}", i)));
            }
            ebw_core::policy::check_dist(row, true, &format!("policy of player {}", i))
                .map_err(|e| EquilibriumError::InvalidProfile(e.to_string()))?;
        }
        if q[i].len() != ds.n_profiles() || q[i].iter().any(|r| r.len() != game.n_actions(i)) {
            return Err(EquilibriumError::InconsistentCompletion(format!("completion shape for player {}", i)));
        }
    }
    let mut witnesses = Vec::new();
    for i in 0..n {
        let marginal = device.marginal(i);
        for (mi, pm) in marginal.iter().enumerate() {
            if !pm.is_positive() {
                continue;
            }
            let pi = &policies[i][mi];
            let mut values = vec![P::zero(); game.n_actions(i)];
            for co in 0..ds.n_co(i) {
                let mbar = ds.combine(i, mi, co);
                let midx = ds.index(&mbar);
                let w = device.joint()[midx].clone() / pm.clone();
                if w.is_zero() {
                    continue;
                }
                let truth: MixedProfile<P> = (0..n)
                    .map(|j| if j == i { pi.clone() } else { policies[j][mbar[j]].clone() })
                    .collect();
                let on_path = game.co_distribution(i, &truth);
                for (a, v) in values.iter_mut().enumerate() {
                    let cond: &[P] = if pi[a].is_positive() { &on_path } else { &q[i][midx][a] };
                    if cond.len() != game.shape().n_co(i) {
                        return Err(EquilibriumError::InconsistentCompletion(format!(
                            "completion row length for player {}",
                            i
                        )));
                    }
                    *v = v.clone() + w.clone() * game.expected_payoff_against(i, a, cond);
                }
            }
            let lhs: P = pi.iter().zip(&values).map(|(p, v)| p.clone() * v.clone()).sum();
            let best = ebw_planning::argmax_lowest(&values);
            let gap = values[best].clone() - lhs;
            if gap > *eps {
                witnesses.push(Witness::deviation(
                    i,
                    format!("message {}", device.messages(i)[mi]),
                    game.action_label(i, best),
                    &gap,
                ));
            }
        }
    }
    Ok(Verdict::new("correlated-embedded", witnesses, Tolerances::eps(eps)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use ebw_core::{q, Rational};

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
    fn nash_as_trivial_device() {
        let g = pd();
        let p = g.pure_profile(&[0, 0]).unwrap();
        let (d, pol, qc) = nash_to_cee(&g, &p).unwrap();
        assert!(check_cee(&g, &pol, &d, &qc, &q(0, 1)).unwrap().pass);
        let c = g.pure_profile(&[1, 1]).unwrap();
        let (d, pol, qc) = nash_to_cee(&g, &c).unwrap();
        let v = check_cee(&g, &pol, &d, &qc, &q(0, 1)).unwrap();
        assert!(!v.pass);
        assert_eq!(v.witnesses.len(), 2);
    }

    #[test]
    fn device_validation() {
        assert!(CorrelationDevice::<Rational>::new(vec![vec!["x".into()]], vec![q(1, 2)]).is_err());
        let d = CorrelationDevice::<Rational>::new(
            vec![vec!["x".into(), "y".into()], vec!["z".into()]],
            vec![q(1, 4), q(3, 4)],
        )
        .unwrap();
        assert_eq!(d.marginal(0), vec![q(1, 4), q(3, 4)]);
    }
}
