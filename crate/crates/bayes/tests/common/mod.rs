#![allow(dead_code)]

use std::collections::HashMap;
use std::sync::Arc;

use ebw_core::{
    interact, q, Alphabet, Environment, FnEnvironment, FnPolicy, History, Policy, Rational, Signature,
    TableEnvironment, TablePolicy, Universe,
};

pub fn sig(depth: usize) -> Signature {
    Signature::new(
        Alphabet::actions(&["a0", "a1"]).unwrap(),
        Alphabet::percepts(&["e0", "e1"]).unwrap(),
        depth,
    )
    .unwrap()
}

/// Probability row from small integer weights (uniform if all zero).
pub fn row(w: &[u8]) -> Vec<Rational> {
    let s: i64 = w.iter().map(|&x| x as i64).sum();
    if s == 0 {
        return vec![q(1, w.len() as i64); w.len()];
    }
    w.iter().map(|&x| q(x as i64, s)).collect()
}

pub fn n_histories(depth: usize) -> usize {
    History::all_up_to(depth - 1, 2, 2).len()
}

pub fn table_policy(depth: usize, ws: &[u8]) -> Arc<dyn Policy<Rational>> {
    let rows: HashMap<History, Vec<Rational>> = History::all_up_to(depth - 1, 2, 2)
        .into_iter()
        .enumerate()
        .map(|(i, h)| (h, row(&ws[2 * i..2 * i + 2])))
        .collect();
    Arc::new(TablePolicy::new(sig(depth), rows, true).unwrap())
}

pub fn table_env(depth: usize, ws: &[u8]) -> Arc<dyn Environment<Rational>> {
    let mut rows = HashMap::new();
    let mut i = 0;
    for h in History::all_up_to(depth - 1, 2, 2) {
        for a in 0..2 {
            rows.insert((h.clone(), a), row(&ws[2 * i..2 * i + 2]));
            i += 1;
        }
    }
    Arc::new(TableEnvironment::new(sig(depth), rows, true).unwrap())
}

pub fn universe(pi: Arc<dyn Policy<Rational>>, nu: Arc<dyn Environment<Rational>>) -> Arc<dyn Universe<Rational>> {
    Arc::new(interact(pi, nu).unwrap())
}

/// Stationary Bernoulli policy: a0 with probability p.
pub fn bern_policy(depth: usize, p: Rational) -> Arc<dyn Policy<Rational>> {
    Arc::new(FnPolicy::new(sig(depth), move |_| vec![p.clone(), q(1, 1) - p.clone()]).with_key(|_| 0))
}

/// Stationary environment: e0 with probability p after a0, p_alt after a1.
pub fn bern_env(depth: usize, p: Rational, p_alt: Rational) -> Arc<dyn Environment<Rational>> {
    Arc::new(
        FnEnvironment::new(sig(depth), move |_, a| {
            let x = if a == 0 { p.clone() } else { p_alt.clone() };
            vec![x.clone(), q(1, 1) - x]
        })
        .with_key(|_| 0),
    )
}
