//! Structured pass/fail certificates.

use serde::{Deserialize, Serialize};

use ebw_core::Scalar;

/// A reason a check failed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    /// A deviation gaining `gap` over the checked behaviour.
    Deviation {
        player: usize,
        context: String,
        deviation: String,
        gap: String,
        gap_f64: f64,
    },
    /// Beliefs `distance` away from the ground truth.
    Belief {
        player: usize,
        context: String,
        distance: String,
        distance_f64: f64,
    },
    /// A structural failure such as an on-path mismatch or infeasibility.
    Other { player: Option<usize>, detail: String },
}

impl Witness {
    pub fn deviation<P: Scalar>(player: usize, context: impl Into<String>, deviation: impl Into<String>, gap: &P) -> Self {
        Witness::Deviation {
            player,
            context: context.into(),
            deviation: deviation.into(),
            gap: gap.token(),
            gap_f64: gap.to_f64(),
        }
    }

    pub fn belief<P: Scalar>(player: usize, context: impl Into<String>, distance: &P) -> Self {
        Witness::Belief {
            player,
            context: context.into(),
            distance: distance.token(),
            distance_f64: distance.to_f64(),
        }
    }

    pub fn player(&self) -> Option<usize> {
        match self {
            Witness::Deviation { player, .. } | Witness::Belief { player, .. } => Some(*player),
            Witness::Other { player, .. } => *player,
        }
    }
}

/// Tolerances a verdict was issued under, as scalar tokens.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<String>,
    /// Largest planning truncation slack γ^H used.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub planning_slack: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scan_depth: Option<usize>,
}

impl Tolerances {
    pub fn eps<P: Scalar>(eps: &P) -> Self {
        Tolerances {
            eps: Some(eps.token()),
            ..Default::default()
        }
    }
}

/// Outcome of an equilibrium check; passes exactly when there is no witness.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub concept: String,
    pub pass: bool,
    pub witnesses: Vec<Witness>,
    pub tolerances: Tolerances,
}

impl Verdict {
    pub fn new(concept: impl Into<String>, witnesses: Vec<Witness>, tolerances: Tolerances) -> Self {
        Verdict {
            concept: concept.into(),
            pass: witnesses.is_empty(),
            witnesses,
            tolerances,
        }
    }

    /// Conjunction of verdicts under a new concept name.
    pub fn all(concept: impl Into<String>, parts: Vec<Verdict>, tolerances: Tolerances) -> Self {
        let witnesses = parts.into_iter().flat_map(|v| v.witnesses).collect();
        Verdict::new(concept, witnesses, tolerances)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("verdicts serialize")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ebw_core::q;

    #[test]
    fn failing_verdict_has_witness() {
        let v = Verdict::new("nash", vec![Witness::deviation(0, "", "D", &q(1, 1))], Tolerances::eps(&q(0, 1)));
        assert!(!v.pass);
        let back: Verdict = serde_json::from_str(&v.to_json()).unwrap();
        assert_eq!(back, v);
        assert!(Verdict::new("nash", vec![], Tolerances::default()).pass);
    }
}
