//! Tail games and convergence scans over a recorded trajectory.

use std::fmt;
use std::sync::Arc;

use ebw_core::{History, Policy, Scalar, Universe};
use ebw_equilibria::{check_eps_scee, check_epsilon_see, CheckOptions, EmbeddedPlayer, HistoryDevice, Verdict};
use serde::{Deserialize, Serialize};

use crate::error::{config, Result};
use crate::experiment::Experiment;
use crate::record::TrajectoryRecord;
use crate::spec::ExperimentSpec;

pub const REPORT_SCHEMA: &str = "ebw-convergence/1";

/// The game after the realized prefix h_{<t}: the original policies, models
/// and truths evaluated at the realized personal histories, plus the
/// point-mass correlation device on those histories.
pub struct TailGame<P: Scalar> {
    pub t: usize,
    pub at: Vec<History>,
    pub policies: Vec<Arc<dyn Policy<P>>>,
    pub models: Vec<Arc<dyn Universe<P>>>,
    pub truths: Vec<Arc<dyn Universe<P>>>,
    pub device: HistoryDevice<P>,
}

impl<P: Scalar> TailGame<P> {
    pub fn players(&self, exp: &Experiment<P>) -> Vec<EmbeddedPlayer<P>> {
        (0..self.at.len())
            .map(|i| EmbeddedPlayer {
                policy: self.policies[i].clone(),
                model: self.models[i].clone(),
                truth: self.truths[i].clone(),
                task: exp.agents()[i].task().clone(),
                at: self.at[i].clone(),
            })
            .collect()
    }
}

pub fn tail_extract<P: Scalar>(exp: &Experiment<P>, record: &TrajectoryRecord, t: usize) -> Result<TailGame<P>> {
    let at = exp.histories_before(record, t)?;
    let device = HistoryDevice::new(vec![(at.clone(), P::one())])?;
    Ok(TailGame {
        t,
        at,
        policies: exp.policies().to_vec(),
        models: exp.models().to_vec(),
        truths: exp.truths().to_vec(),
        device,
    })
}

/// First step whose belief distance is within ε for every agent.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FirstTime {
    Reached(usize),
    NotReached,
}

impl Serialize for FirstTime {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            FirstTime::Reached(t) => s.serialize_u64(*t as u64),
            FirstTime::NotReached => s.serialize_str("not reached"),
        }
    }
}

impl<'de> Deserialize<'de> for FirstTime {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Step(usize),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Step(t) => Ok(FirstTime::Reached(t)),
            Raw::Text(s) if s == "not reached" => Ok(FirstTime::NotReached),
            Raw::Text(s) => Err(serde::de::Error::custom(format!("unexpected {:?}", s))),
        }
    }
}

impl fmt::Display for FirstTime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FirstTime::Reached(t) => write!(f, "{}", t),
            FirstTime::NotReached => f.write_str("not reached"),
        }
    }
}

impl FirstTime {
    pub fn step(&self) -> Option<usize> {
        match self {
            FirstTime::Reached(t) => Some(*t),
            FirstTime::NotReached => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub schema: String,
    pub scenario: String,
    pub seed: u64,
    pub eps: String,
    pub k_scan: usize,
    pub t_eps: FirstTime,
    /// D_k per step (rows) and agent (columns).
    pub d_k: Vec<Vec<String>>,
    /// ε-SEE and ε-SCEE of the tail game at T(ε), when reached.
    pub verdicts_at_t: Vec<Verdict>,
    /// The same checks after the final recorded step's prefix.
    pub verdicts_final: Vec<Verdict>,
    pub final_actions: Vec<String>,
    pub final_chosen_q: Vec<String>,
}

impl ConvergenceReport {
    /// Reached, and every tail verdict at T(ε) passes.
    pub fn pass(&self) -> bool {
        self.t_eps.step().is_some() && self.verdicts_at_t.iter().all(|v| v.pass)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("reports serialize")
    }
}

fn tail_verdicts<P: Scalar>(exp: &Experiment<P>, record: &TrajectoryRecord, t: usize, eps: &P, k_scan: usize) -> Result<Vec<Verdict>> {
    let tail = tail_extract(exp, record, t)?;
    let players = tail.players(exp);
    let opts = CheckOptions {
        delta_br: exp.spec().tolerances.delta.value()?,
        k_scan,
    };
    Ok(vec![
        check_epsilon_see(&players, eps, exp.budget(), &opts)?,
        check_eps_scee(&players, &tail.device, eps, exp.budget(), &opts)?,
    ])
}

/// First t with D_{k_scan}(ρ^i, truth | h_{<t}) ≤ ε for all i, with tail
/// equilibrium verdicts at that t and at the final step.
pub fn convergence_scan<P: Scalar>(
    exp: &Experiment<P>,
    record: &TrajectoryRecord,
    eps: &P,
    k_scan: usize,
) -> Result<ConvergenceReport> {
    if k_scan == 0 {
        return Err(config("k_scan must be at least 1"));
    }
    if record.is_empty() {
        return Err(config("empty record"));
    }
    let mut d_k = Vec::new();
    for t in 1..=record.len() {
        let row: Vec<P> = if k_scan == record.header.k_scan {
            record.steps[t - 1]
                .d_k
                .iter()
                .map(|x| P::parse_token(x))
                .collect::<std::result::Result<_, _>>()?
        } else {
            let hs = exp.histories_before(record, t)?;
            (0..exp.n_agents())
                .map(|i| exp.belief_distance(i, &hs[i], k_scan))
                .collect::<Result<_>>()?
        };
        d_k.push(row);
    }
    let t_eps = d_k
        .iter()
        .position(|row| row.iter().all(|d| d <= eps))
        .map(|p| FirstTime::Reached(p + 1))
        .unwrap_or(FirstTime::NotReached);
    let verdicts_at_t = match t_eps {
        FirstTime::Reached(t) => tail_verdicts(exp, record, t, eps, k_scan)?,
        FirstTime::NotReached => Vec::new(),
    };
    let verdicts_final = tail_verdicts(exp, record, record.len(), eps, k_scan)?;
    let last = record.steps.last().expect("nonempty record");
    Ok(ConvergenceReport {
        schema: REPORT_SCHEMA.to_string(),
        scenario: record.header.scenario.clone(),
        seed: record.header.seed,
        eps: eps.token(),
        k_scan,
        t_eps,
        d_k: d_k.iter().map(|r| r.iter().map(|x| x.token()).collect()).collect(),
        verdicts_at_t,
        verdicts_final,
        final_actions: last.actions.clone(),
        final_chosen_q: last.chosen_q.clone(),
    })
}

/// Per-seed scan results with the empirical pass rate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiSeedReport {
    pub scenario: String,
    pub eps: String,
    pub runs: Vec<SeedOutcome>,
    pub passed: usize,
    pub pass_rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedOutcome {
    pub seed: u64,
    pub t_eps: FirstTime,
    pub pass: bool,
}

/// Runs and scans the spec once per seed of its seed list.
pub fn multi_seed_scan<P: Scalar>(spec: &ExperimentSpec) -> Result<MultiSeedReport> {
    let eps: P = spec.tolerances.eps.value()?;
    let mut runs = Vec::new();
    for seed in spec.seed_list() {
        let mut s = spec.clone();
        s.seed = seed;
        let exp = Experiment::<P>::build(&s)?;
        let record = exp.run()?;
        let report = convergence_scan(&exp, &record, &eps, s.k_scan)?;
        runs.push(SeedOutcome {
            seed,
            t_eps: report.t_eps,
            pass: report.pass(),
        });
    }
    let passed = runs.iter().filter(|r| r.pass).count();
    Ok(MultiSeedReport {
        scenario: spec.id().to_string(),
        eps: eps.token(),
        pass_rate: passed as f64 / runs.len() as f64,
        passed,
        runs,
    })
}
