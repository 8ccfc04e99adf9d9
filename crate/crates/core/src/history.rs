use std::fmt;

use serde::{Deserialize, Serialize};

use crate::alphabet::Alphabet;
use crate::error::{CoreError, Result};

/// Interleaved action/percept indices, one pair per turn.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct History {
    turns: Vec<(usize, usize)>,
}

impl History {
    pub fn empty() -> Self {
        History { turns: Vec::new() }
    }

    pub fn from_turns(turns: Vec<(usize, usize)>) -> Self {
        History { turns }
    }

    pub fn turns(&self) -> &[(usize, usize)] {
        &self.turns
    }

    pub fn len(&self) -> usize {
        self.turns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.turns.is_empty()
    }

    pub fn push(&mut self, a: usize, e: usize) {
        self.turns.push((a, e));
    }

    pub fn pop(&mut self) -> Option<(usize, usize)> {
        self.turns.pop()
    }

    /// New history with one more turn.
    pub fn extended(&self, a: usize, e: usize) -> Self {
        let mut turns = Vec::with_capacity(self.turns.len() + 1);
        turns.extend_from_slice(&self.turns);
        turns.push((a, e));
        History { turns }
    }

    pub fn concat(&self, tail: &History) -> Self {
        let mut turns = self.turns.clone();
        turns.extend_from_slice(&tail.turns);
        History { turns }
    }

    pub fn prefix(&self, n: usize) -> Self {
        History {
            turns: self.turns[..n.min(self.turns.len())].to_vec(),
        }
    }

    pub fn suffix_from(&self, n: usize) -> Self {
        History {
            turns: self.turns[n.min(self.turns.len())..].to_vec(),
        }
    }

    pub fn last(&self) -> Option<(usize, usize)> {
        self.turns.last().copied()
    }

    pub fn actions(&self) -> impl Iterator<Item = usize> + '_ {
        self.turns.iter().map(|t| t.0)
    }

    pub fn percepts(&self) -> impl Iterator<Item = usize> + '_ {
        self.turns.iter().map(|t| t.1)
    }

    /// True if `self` is a prefix of `other`.
    pub fn is_prefix_of(&self, other: &History) -> bool {
        other.turns.len() >= self.turns.len() && other.turns[..self.turns.len()] == self.turns[..]
    }

    /// Token form, e.g. "C/C C/D".
    pub fn to_tokens(&self, actions: &Alphabet, percepts: &Alphabet) -> String {
        self.turns
            .iter()
            .map(|&(a, e)| format!("{}/{}", actions.label(a), percepts.label(e)))
            .collect::<Vec<_>>()
            .join(" ")
    }

    /// Token form followed by a dangling action, e.g. "C/C D".
    pub fn to_tokens_with_action(&self, a: usize, actions: &Alphabet, percepts: &Alphabet) -> String {
        let head = self.to_tokens(actions, percepts);
        if head.is_empty() {
            actions.label(a).to_string()
        } else {
            format!("{} {}", head, actions.label(a))
        }
    }

    pub fn parse(s: &str, actions: &Alphabet, percepts: &Alphabet) -> Result<Self> {
        let (h, dangling) = Self::parse_with_action(s, actions, percepts)?;
        if dangling.is_some() {
            return Err(CoreError::Parse(format!("unexpected dangling action in {:?}", s)));
        }
        Ok(h)
    }

    /// Parses a history optionally followed by one dangling action token.
    pub fn parse_with_action(
        s: &str,
        actions: &Alphabet,
        percepts: &Alphabet,
    ) -> Result<(Self, Option<usize>)> {
        let tokens: Vec<&str> = s.split_whitespace().collect();
        let mut turns = Vec::with_capacity(tokens.len());
        let mut dangling = None;
        for (i, tok) in tokens.iter().enumerate() {
            match tok.split_once('/') {
                Some((a, e)) => {
                    if dangling.is_some() {
                        return Err(CoreError::Parse(format!("turn after dangling action in {:?}", s)));
                    }
                    turns.push((actions.index_of(a)?, percepts.index_of(e)?));
                }
                None => {
                    if i + 1 != tokens.len() {
                        return Err(CoreError::Parse(format!("dangling action not last in {:?}", s)));
                    }
                    dangling = Some(actions.index_of(tok)?);
                }
            }
        }
        Ok((History { turns }, dangling))
    }

    /// All histories with exactly `len` turns, in lexicographic index order.
    pub fn all_of_length(len: usize, n_actions: usize, n_percepts: usize) -> Vec<History> {
        let mut out = vec![History::empty()];
        for _ in 0..len {
            let mut next = Vec::with_capacity(out.len() * n_actions * n_percepts);
            for h in &out {
                for a in 0..n_actions {
                    for e in 0..n_percepts {
                        next.push(h.extended(a, e));
                    }
                }
            }
            out = next;
        }
        out
    }

    /// All histories with at most `depth` turns, shortest first.
    pub fn all_up_to(depth: usize, n_actions: usize, n_percepts: usize) -> Vec<History> {
        (0..=depth)
            .flat_map(|l| Self::all_of_length(l, n_actions, n_percepts))
            .collect()
    }
}

impl fmt::Display for History {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.turns.is_empty() {
            return write!(f, "ε");
        }
        let parts: Vec<String> = self.turns.iter().map(|(a, e)| format!("{}/{}", a, e)).collect();
        write!(f, "{}", parts.join(" "))
    }
}

/// Joint history of several agents: per turn, the joint action and joint percept.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct JointHistory {
    turns: Vec<(Vec<usize>, Vec<usize>)>,
}

impl JointHistory {
    pub fn empty() -> Self {
        JointHistory { turns: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.turns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.turns.is_empty()
    }

    pub fn turns(&self) -> &[(Vec<usize>, Vec<usize>)] {
        &self.turns
    }

    pub fn push(&mut self, actions: Vec<usize>, percepts: Vec<usize>) {
        self.turns.push((actions, percepts));
    }

    pub fn extended(&self, actions: Vec<usize>, percepts: Vec<usize>) -> Self {
        let mut out = self.clone();
        out.push(actions, percepts);
        out
    }

    pub fn prefix(&self, n: usize) -> Self {
        JointHistory {
            turns: self.turns[..n.min(self.turns.len())].to_vec(),
        }
    }

    /// The subjective history of agent `i`.
    pub fn personal(&self, i: usize) -> History {
        History::from_turns(self.turns.iter().map(|(a, e)| (a[i], e[i])).collect())
    }
}
