//! Q-table export as CSV with a schema header line.

use ebw_core::{table::history_key, History, Scalar, Universe};

use crate::error::{PlanningError, Result};
use crate::task::{DiscountedTask, PlanBudget};
use crate::value::{Engine, Model, OPTIMAL};

pub const QTABLE_SCHEMA: &str = "ebw-qtable/1";

/// One row per (history, action): Q^k for each requested k, Q*, and γ^H.
pub fn q_table_csv<P: Scalar>(
    rho: &dyn Universe<P>,
    histories: &[History],
    ks: &[usize],
    task: &DiscountedTask<P>,
    budget: &PlanBudget,
) -> Result<String> {
    let sig = rho.signature();
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["history".to_string(), "action".to_string()];
    header.extend(ks.iter().map(|k| format!("q{}", k)));
    header.extend(["q_star".to_string(), "error_bound".to_string()]);
    w.write_record(&header).map_err(|e| PlanningError::Export(e.to_string()))?;
    for h in histories {
        let mut eng = Engine::new(Model::Universe(rho), task);
        let steps = eng.horizon(h, budget)?;
        let mut cols: Vec<Vec<P>> = Vec::new();
        for &k in ks {
            if k == 0 {
                return Err(PlanningError::InvalidBudget("k must be at least 1".into()));
            }
            cols.push(eng.q_all(h, steps, k)?);
        }
        cols.push(eng.q_all(h, steps, OPTIMAL)?);
        let bound = task.gamma().pow(steps).token();
        for a in 0..sig.n_actions() {
            let mut row = vec![history_key(h, sig), sig.actions.label(a).to_string()];
            row.extend(cols.iter().map(|c| c[a].token()));
            row.push(bound.clone());
            w.write_record(&row).map_err(|e| PlanningError::Export(e.to_string()))?;
        }
    }
    let body = String::from_utf8(w.into_inner().map_err(|e| PlanningError::Export(e.to_string()))?)
        .map_err(|e| PlanningError::Export(e.to_string()))?;
    Ok(format!("# {}\n{}", QTABLE_SCHEMA, body))
}
