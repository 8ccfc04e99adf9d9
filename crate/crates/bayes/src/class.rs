use std::sync::Arc;

use ebw_core::{Scalar, Signature, Universe};

use crate::error::{BayesError, Result};

/// Labeled finite list of universes with shared alphabets.
#[derive(Clone)]
pub struct HypothesisClass<P: Scalar> {
    labels: Vec<String>,
    members: Vec<Arc<dyn Universe<P>>>,
    sig: Signature,
}

impl<P: Scalar> HypothesisClass<P> {
    pub fn new(members: Vec<(String, Arc<dyn Universe<P>>)>) -> Result<Self> {
        let first = members
            .first()
            .ok_or_else(|| BayesError::InvalidClass("empty class".into()))?;
        let mut sig = first.1.signature().clone();
        let mut labels: Vec<String> = Vec::with_capacity(members.len());
        for (label, u) in &members {
            if labels.contains(label) {
                return Err(BayesError::InvalidClass(format!("duplicate label {}", label)));
            }
            sig.matches(u.signature())?;
            sig.depth = sig.depth.min(u.signature().depth);
            labels.push(label.clone());
        }
        Ok(HypothesisClass {
            labels,
            members: members.into_iter().map(|m| m.1).collect(),
            sig,
        })
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn members(&self) -> &[Arc<dyn Universe<P>>] {
        &self.members
    }

    pub fn member(&self, i: usize) -> &Arc<dyn Universe<P>> {
        &self.members[i]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn signature(&self) -> &Signature {
        &self.sig
    }
}

/// Prior weights w(λ) > 0 with Σ w ≤ 1.
#[derive(Clone, Debug, PartialEq)]
pub struct Prior<P: Scalar> {
    weights: Vec<P>,
}

impl<P: Scalar> Prior<P> {
    pub fn new(weights: Vec<P>) -> Result<Self> {
        if weights.is_empty() {
            return Err(BayesError::InvalidPrior("no weights".into()));
        }
        if weights.iter().any(|w| !w.is_positive()) {
            return Err(BayesError::InvalidPrior("weights must be positive".into()));
        }
        let s: P = weights.iter().cloned().sum();
        let over = if P::EXACT {
            s > P::one()
        } else {
            s.to_f64() > 1.0 + 1e-9
        };
        if over {
            return Err(BayesError::InvalidPrior(format!("total weight {} exceeds 1", s)));
        }
        Ok(Prior { weights })
    }

    pub fn uniform(n: usize) -> Self {
        Prior {
            weights: vec![P::from_ratio(1, n as i64); n],
        }
    }

    pub fn weights(&self) -> &[P] {
        &self.weights
    }

    pub fn total(&self) -> P {
        self.weights.iter().cloned().sum()
    }

    /// True when the weights sum to one.
    pub fn is_normalized(&self) -> bool {
        self.total().approx_eq(&P::one(), 1e-12)
    }

    /// Weights divided by their total.
    pub fn normalized(&self) -> Vec<P> {
        let t = self.total();
        self.weights.iter().map(|w| w.clone() / t.clone()).collect()
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}
