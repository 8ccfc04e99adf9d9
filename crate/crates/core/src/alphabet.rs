use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AlphabetKind {
    Action,
    Percept,
}

/// Ordered set of symbol names; label `i` has index `i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Alphabet {
    labels: Vec<String>,
    kind: AlphabetKind,
}

impl Alphabet {
    pub fn new<S: AsRef<str>>(kind: AlphabetKind, labels: &[S]) -> Result<Self> {
        if labels.is_empty() {
            return Err(CoreError::InvalidAlphabet("empty alphabet".into()));
        }
        let mut seen = HashSet::new();
        let mut out = Vec::with_capacity(labels.len());
        for l in labels {
            let l = l.as_ref();
            // Histories are written "action/percept", so only actions must avoid '/'.
            let slash = kind == AlphabetKind::Action && l.contains('/');
            if l.is_empty() || l.contains(char::is_whitespace) || slash {
                return Err(CoreError::InvalidAlphabet(format!("bad label {:?}", l)));
            }
            if !seen.insert(l.to_string()) {
                return Err(CoreError::InvalidAlphabet(format!("duplicate label {:?}", l)));
            }
            out.push(l.to_string());
        }
        Ok(Alphabet { labels: out, kind })
    }

    pub fn actions<S: AsRef<str>>(labels: &[S]) -> Result<Self> {
        Self::new(AlphabetKind::Action, labels)
    }

    pub fn percepts<S: AsRef<str>>(labels: &[S]) -> Result<Self> {
        Self::new(AlphabetKind::Percept, labels)
    }

    /// Percept alphabet built from (observation, reward) pairs; labels are
    /// `obs:reward` with the reward's canonical token.
    pub fn from_percepts<P: Scalar>(percepts: &[Percept<P>]) -> Result<Self> {
        let labels: Vec<String> = percepts.iter().map(|p| p.label()).collect();
        Self::new(AlphabetKind::Percept, &labels)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn kind(&self) -> AlphabetKind {
        self.kind
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| CoreError::Parse(format!("unknown symbol {:?}", label)))
    }

    pub fn check(&self, i: usize) -> Result<()> {
        if i < self.labels.len() {
            Ok(())
        } else {
            Err(CoreError::IndexOutOfRange {
                index: i,
                size: self.labels.len(),
            })
        }
    }

    /// Same labels regardless of kind.
    pub fn same_symbols(&self, other: &Alphabet) -> bool {
        self.labels == other.labels
    }
}

/// A percept as an observation paired with a reward in [0, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct Percept<P> {
    pub observation: String,
    pub reward: P,
}

impl<P: Scalar> Percept<P> {
    pub fn new(observation: &str, reward: P) -> Result<Self> {
        if reward < P::zero() || reward > P::one() {
            return Err(CoreError::InvalidAlphabet(format!(
                "reward {} outside [0,1]",
                reward
            )));
        }
        Ok(Percept {
            observation: observation.to_string(),
            reward,
        })
    }

    pub fn label(&self) -> String {
        format!("{}:{}", self.observation, self.reward.token())
    }

    /// Inverse of `label`.
    pub fn parse(label: &str) -> Result<Self> {
        let (obs, r) = label
            .rsplit_once(':')
            .ok_or_else(|| CoreError::Parse(format!("percept label {:?}", label)))?;
        Self::new(obs, P::parse_token(r)?)
    }
}

/// Action alphabet, percept alphabet and the deepest history an evaluator
/// answers for.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Signature {
    pub actions: Alphabet,
    pub percepts: Alphabet,
    pub depth: usize,
}

impl Signature {
    pub fn new(actions: Alphabet, percepts: Alphabet, depth: usize) -> Result<Self> {
        if actions.kind() != AlphabetKind::Action || percepts.kind() != AlphabetKind::Percept {
            return Err(CoreError::InvalidAlphabet("alphabet kinds swapped".into()));
        }
        Ok(Signature {
            actions,
            percepts,
            depth,
        })
    }

    pub fn n_actions(&self) -> usize {
        self.actions.len()
    }

    pub fn n_percepts(&self) -> usize {
        self.percepts.len()
    }

    /// Error unless a history of length `len` may be queried.
    pub fn check_len(&self, len: usize) -> Result<()> {
        if len > self.depth {
            Err(CoreError::DepthExceeded {
                len,
                max: self.depth,
            })
        } else {
            Ok(())
        }
    }

    /// Error unless an action may follow a history of length `len`.
    pub fn check_extend(&self, len: usize) -> Result<()> {
        self.check_len(len + 1)
    }

    pub fn matches(&self, other: &Signature) -> Result<()> {
        if self.actions != other.actions {
            return Err(CoreError::AlphabetMismatch(format!(
                "actions {:?} vs {:?}",
                self.actions.labels(),
                other.actions.labels()
            )));
        }
        if self.percepts != other.percepts {
            return Err(CoreError::AlphabetMismatch(format!(
                "percepts {:?} vs {:?}",
                self.percepts.labels(),
                other.percepts.labels()
            )));
        }
        Ok(())
    }

    pub fn with_depth(&self, depth: usize) -> Signature {
        Signature {
            depth,
            ..self.clone()
        }
    }
}
