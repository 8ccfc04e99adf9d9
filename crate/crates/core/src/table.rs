//! Nested-map documents for policies, environments and universes.
//!
//! Rows are keyed by history tokens ("C/C C/D"); environment rows append the
//! dangling action ("C/C D"). The empty history is written "ε". Probabilities
//! are scalar tokens, so rational tables round-trip bit for bit.

use std::collections::HashMap;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::alphabet::{Alphabet, Signature};
use crate::error::{CoreError, Result};
use crate::history::History;
use crate::environment::TableEnvironment;
use crate::policy::TablePolicy;
use crate::scalar::Scalar;
use crate::universe::TableUniverse;

pub const TABLE_SCHEMA: &str = "ebw-table/1";
pub const EMPTY_TOKEN: &str = "ε";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TableKind {
    Policy,
    Environment,
    Universe,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableDoc {
    pub schema: String,
    pub kind: TableKind,
    pub backend: String,
    pub actions: Vec<String>,
    pub percepts: Vec<String>,
    pub depth: usize,
    #[serde(default = "default_true")]
    pub proper: bool,
    #[serde(default, skip_serializing_if = "IndexMap::is_empty")]
    pub action_rows: IndexMap<String, Vec<String>>,
    #[serde(default, skip_serializing_if = "IndexMap::is_empty")]
    pub percept_rows: IndexMap<String, Vec<String>>,
}

fn default_true() -> bool {
    true
}

impl TableDoc {
    fn header<P: Scalar>(kind: TableKind, sig: &Signature, proper: bool) -> Self {
        TableDoc {
            schema: TABLE_SCHEMA.to_string(),
            kind,
            backend: P::BACKEND.to_string(),
            actions: sig.actions.labels().to_vec(),
            percepts: sig.percepts.labels().to_vec(),
            depth: sig.depth,
            proper,
            action_rows: IndexMap::new(),
            percept_rows: IndexMap::new(),
        }
    }

    pub fn signature(&self) -> Result<Signature> {
        if self.schema != TABLE_SCHEMA {
            return Err(CoreError::Table(format!("unknown schema {:?}", self.schema)));
        }
        Signature::new(
            Alphabet::actions(&self.actions)?,
            Alphabet::percepts(&self.percepts)?,
            self.depth,
        )
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("table documents serialize")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| CoreError::Parse(e.to_string()))
    }

    fn expect_kind(&self, kind: TableKind) -> Result<()> {
        if self.kind != kind {
            return Err(CoreError::Table(format!("expected a {:?} table, found {:?}", kind, self.kind)));
        }
        Ok(())
    }
}

pub fn history_key(h: &History, sig: &Signature) -> String {
    if h.is_empty() {
        EMPTY_TOKEN.to_string()
    } else {
        h.to_tokens(&sig.actions, &sig.percepts)
    }
}

pub fn history_action_key(h: &History, a: usize, sig: &Signature) -> String {
    h.to_tokens_with_action(a, &sig.actions, &sig.percepts)
}

pub fn parse_history_key(s: &str, sig: &Signature) -> Result<History> {
    if s.trim() == EMPTY_TOKEN {
        return Ok(History::empty());
    }
    History::parse(s, &sig.actions, &sig.percepts)
}

pub fn parse_history_action_key(s: &str, sig: &Signature) -> Result<(History, usize)> {
    let (h, a) = History::parse_with_action(s, &sig.actions, &sig.percepts)?;
    let a = a.ok_or_else(|| CoreError::Parse(format!("missing dangling action in {:?}", s)))?;
    Ok((h, a))
}

fn tokens<P: Scalar>(row: &[P]) -> Vec<String> {
    row.iter().map(|x| x.token()).collect()
}

fn parse_row<P: Scalar>(row: &[String]) -> Result<Vec<P>> {
    row.iter().map(|t| P::parse_token(t)).collect()
}

fn ordered_histories(sig: &Signature) -> Vec<History> {
    if sig.depth == 0 {
        return Vec::new();
    }
    History::all_up_to(sig.depth - 1, sig.n_actions(), sig.n_percepts())
}

pub fn policy_to_doc<P: Scalar>(p: &TablePolicy<P>) -> TableDoc {
    let sig = crate::policy::Policy::signature(p);
    let mut doc = TableDoc::header::<P>(TableKind::Policy, sig, crate::policy::Policy::is_proper(p));
    for h in ordered_histories(sig) {
        if let Some(row) = p.rows().get(&h) {
            doc.action_rows.insert(history_key(&h, sig), tokens(row));
        }
    }
    doc
}

pub fn policy_from_doc<P: Scalar>(doc: &TableDoc) -> Result<TablePolicy<P>> {
    doc.expect_kind(TableKind::Policy)?;
    let sig = doc.signature()?;
    let mut rows = HashMap::new();
    for (k, v) in &doc.action_rows {
        rows.insert(parse_history_key(k, &sig)?, parse_row(v)?);
    }
    TablePolicy::new(sig, rows, doc.proper)
}

pub fn environment_to_doc<P: Scalar>(e: &TableEnvironment<P>) -> TableDoc {
    use crate::environment::Environment;
    let sig = e.signature();
    let mut doc = TableDoc::header::<P>(TableKind::Environment, sig, e.is_proper());
    for h in ordered_histories(sig) {
        for a in 0..sig.n_actions() {
            if let Some(row) = e.rows().get(&(h.clone(), a)) {
                doc.percept_rows.insert(history_action_key(&h, a, sig), tokens(row));
            }
        }
    }
    doc
}

pub fn environment_from_doc<P: Scalar>(doc: &TableDoc) -> Result<TableEnvironment<P>> {
    doc.expect_kind(TableKind::Environment)?;
    let sig = doc.signature()?;
    let mut rows = HashMap::new();
    for (k, v) in &doc.percept_rows {
        rows.insert(parse_history_action_key(k, &sig)?, parse_row(v)?);
    }
    TableEnvironment::new(sig, rows, doc.proper)
}

pub fn universe_to_doc<P: Scalar>(u: &TableUniverse<P>) -> TableDoc {
    use crate::universe::Universe;
    let sig = u.signature();
    let mut doc = TableDoc::header::<P>(TableKind::Universe, sig, true);
    for h in ordered_histories(sig) {
        if let Some(row) = u.action_rows().get(&h) {
            doc.action_rows.insert(history_key(&h, sig), tokens(row));
        }
        for a in 0..sig.n_actions() {
            if let Some(row) = u.percept_rows().get(&(h.clone(), a)) {
                doc.percept_rows.insert(history_action_key(&h, a, sig), tokens(row));
            }
        }
    }
    doc
}

pub fn universe_from_doc<P: Scalar>(doc: &TableDoc) -> Result<TableUniverse<P>> {
    doc.expect_kind(TableKind::Universe)?;
    let sig = doc.signature()?;
    let mut action_rows = HashMap::new();
    for (k, v) in &doc.action_rows {
        action_rows.insert(parse_history_key(k, &sig)?, parse_row(v)?);
    }
    let mut percept_rows = HashMap::new();
    for (k, v) in &doc.percept_rows {
        percept_rows.insert(parse_history_action_key(k, &sig)?, parse_row(v)?);
    }
    TableUniverse::new(sig, action_rows, percept_rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::environment::FnEnvironment;
    use crate::policy::{FnPolicy, Policy};
    use crate::scalar::{q, Rational};

    fn sig() -> Signature {
        Signature::new(
            Alphabet::actions(&["D", "C"]).unwrap(),
            Alphabet::percepts(&["D", "C"]).unwrap(),
            2,
        )
        .unwrap()
    }

    #[test]
    fn policy_round_trip_is_exact() {
        let p = FnPolicy::new(sig(), |h| {
            let c = q(1, 3 + h.len() as i64);
            vec![q(1, 1) - c.clone(), c]
        });
        let t = TablePolicy::tabulate(&p).unwrap();
        let doc = policy_to_doc(&t);
        assert_eq!(doc.action_rows.get_index(0).unwrap().0, "ε");
        assert_eq!(doc.action_rows["C/C"], vec!["3/4", "1/4"]);
        let back: TablePolicy<Rational> = policy_from_doc(&TableDoc::from_json(&doc.to_json()).unwrap()).unwrap();
        assert_eq!(back.rows(), t.rows());
        assert!(back.is_proper());
    }

    #[test]
    fn environment_keys_carry_dangling_action() {
        let e = FnEnvironment::<Rational>::deterministic(sig(), |_, a| a);
        let t = TableEnvironment::tabulate(&e).unwrap();
        let doc = environment_to_doc(&t);
        assert_eq!(doc.percept_rows["D/C C"], vec!["0", "1"]);
        let back: TableEnvironment<Rational> = environment_from_doc(&doc).unwrap();
        assert_eq!(back.rows(), t.rows());
    }

    #[test]
    fn wrong_kind_and_schema_rejected() {
        let e = FnEnvironment::<Rational>::uniform(sig());
        let mut doc = environment_to_doc(&TableEnvironment::tabulate(&e).unwrap());
        assert!(policy_from_doc::<Rational>(&doc).is_err());
        doc.schema = "other".into();
        assert!(environment_from_doc::<Rational>(&doc).is_err());
    }
}
