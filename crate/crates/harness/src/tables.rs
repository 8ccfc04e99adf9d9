//! Serialized scenario tables for the `scenario` subcommand.

use std::sync::Arc;

use ebw_core::{History, Policy, Rational, Scalar};
use ebw_equilibria::{dogmatic_best_response_check, Verdict};
use ebw_planning::{q_table_csv, DiscountedTask};
use ebw_scenarios::{
    m_defect, prisoner_dilemma, q_gap_formula, see_not_ee_beliefs, see_not_ee_game, threshold, twin_pd, MuRk,
    ScenarioId, UP,
};
use serde::Serialize;

use crate::error::{HarnessError, Result};
use crate::experiment::{dogmatic_signature, random_pair, Experiment};
use crate::spec::ExperimentSpec;
use crate::suites::{pd_suite, see_not_ee_suite};

pub const TWIN_TABLE_SCHEMA: &str = "ebw-twin-thresholds/1";
pub const DOGMATIC_TABLE_SCHEMA: &str = "ebw-dogmatic/1";

/// A rendered table and whether every verdict behind it passed.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioTable {
    pub text: String,
    pub pass: bool,
}

fn csv_text(rows: Vec<Vec<String>>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.write_record(&r).map_err(|e| HarnessError::Parse(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| HarnessError::Parse(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| HarnessError::Parse(e.to_string()))
}

#[derive(Serialize)]
struct GameTable<'a, T: Serialize> {
    game: ebw_equilibria::GameDoc,
    #[serde(skip_serializing_if = "Option::is_none")]
    beliefs: Option<Vec<Vec<Vec<String>>>>,
    suite: &'a T,
}

/// The scenario's tables: game documents with their suite verdicts, twin
/// thresholds, the μ_{R,k} Q-table, or per-seed dogmatic checks.
pub fn scenario_table<P: Scalar>(spec: &ExperimentSpec) -> Result<ScenarioTable> {
    spec.scenario.validate()?;
    let params = &spec.scenario;
    match spec.id() {
        ScenarioId::Pd => {
            let suite = pd_suite()?;
            let doc = GameTable {
                game: prisoner_dilemma::<P>()?.to_doc(),
                beliefs: None,
                suite: &suite,
            };
            Ok(ScenarioTable {
                text: serde_json::to_string_pretty(&doc).expect("tables serialize") + "\n",
                pass: suite.pass(),
            })
        }
        ScenarioId::SeeNotEe => {
            let suite = see_not_ee_suite()?;
            let beliefs = see_not_ee_beliefs::<P>()
                .iter()
                .map(|p| p.iter().map(|r| r.iter().map(|x| x.token()).collect()).collect())
                .collect();
            let doc = GameTable {
                game: see_not_ee_game::<P>()?.to_doc(),
                beliefs: Some(beliefs),
                suite: &suite,
            };
            Ok(ScenarioTable {
                text: serde_json::to_string_pretty(&doc).expect("tables serialize") + "\n",
                pass: suite.pass(),
            })
        }
        ScenarioId::TwinPd | ScenarioId::CopyPd => {
            let alpha: P = params.alpha()?;
            let t = twin_pd::<P>(params.class_k(), alpha.clone(), spec.rounds)?;
            let p = &t.priors[0];
            let mut rows = vec![vec!["k".into(), "m_k".into(), "threshold".into(), "q_gap".into()]];
            for k in 0..=t.k_class + 1 {
                let m = m_defect(&t.game, p.policies(), p.tilde_w(), k)?;
                rows.push(vec![
                    k.to_string(),
                    m.token(),
                    threshold(&m).token(),
                    q_gap_formula(&alpha, &m).token(),
                ]);
            }
            Ok(ScenarioTable {
                text: format!(
                    "# {} alpha={} class_k={} onset={}\n{}",
                    TWIN_TABLE_SCHEMA,
                    alpha.token(),
                    t.k_class,
                    t.onset,
                    csv_text(rows)?
                ),
                pass: true,
            })
        }
        ScenarioId::MuRk => {
            let exp = Experiment::<P>::build(spec)?;
            let m = MuRk::<P>::new(params.r()?, params.k(), 1)?;
            let mut histories = vec![History::empty()];
            for _ in 0..params.k() {
                let mut h = histories.last().expect("nonempty").clone();
                let e = m.percept(&h, UP);
                h.push(UP, e);
                histories.push(h);
            }
            let ks: Vec<usize> = (1..=params.k() + 1).collect();
            let agent = &exp.agents()[0];
            let text = q_table_csv(exp.models()[0].as_ref(), &histories, &ks, agent.task(), exp.budget())?;
            Ok(ScenarioTable { text, pass: true })
        }
        ScenarioId::Dogmatic => {
            let (text, verdicts) = dogmatic_table::<P>(spec)?;
            Ok(ScenarioTable {
                text,
                pass: verdicts.iter().all(|v| v.pass),
            })
        }
    }
}

/// One dogmatic best-response check per seed of the spec.
pub fn dogmatic_table<P: Scalar>(spec: &ExperimentSpec) -> Result<(String, Vec<Verdict>)> {
    let params = &spec.scenario;
    let sig = dogmatic_signature(params.depth())?;
    let gamma: P = params.gamma()?;
    let task = DiscountedTask::from_percepts(gamma, &sig.percepts)?;
    let budget = spec.plan_budget()?;
    let eps: P = params.eps()?;
    let seeds = if spec.seeds.is_empty() { params.seeds() } else { spec.seeds.clone() };
    let mut rows = vec![vec![
        "seed".into(),
        "pass".into(),
        "witness_gap".into(),
        "planning_slack".into(),
        "allowance".into(),
    ]];
    let mut verdicts = Vec::new();
    for seed in seeds {
        let (pi, mu) = random_pair::<P>(&sig, seed)?;
        let v = dogmatic_best_response_check(pi as Arc<dyn Policy<P>>, mu, &eps, &task, &budget)?;
        let gap = v
            .witnesses
            .iter()
            .find_map(|w| match w {
                ebw_equilibria::Witness::Deviation { gap, .. } => Some(gap.clone()),
                _ => None,
            })
            .unwrap_or_default();
        rows.push(vec![
            seed.to_string(),
            v.pass.to_string(),
            gap,
            v.tolerances.planning_slack.clone().unwrap_or_default(),
            v.tolerances.delta.clone().unwrap_or_default(),
        ]);
        verdicts.push(v);
    }
    let text = format!("# {} backend={}\n{}", DOGMATIC_TABLE_SCHEMA, P::BACKEND, csv_text(rows)?);
    Ok((text, verdicts))
}

/// The exact-backend twin thresholds m_k for k = 0..=max_k.
pub fn twin_thresholds(k_class: usize, max_k: usize) -> Result<Vec<Rational>> {
    let t = twin_pd::<Rational>(k_class, Rational::from_ratio(1, 1), k_class + 2)?;
    let p = &t.priors[0];
    (0..=max_k)
        .map(|k| Ok(m_defect(&t.game, p.policies(), p.tilde_w(), k)?))
        .collect()
}
