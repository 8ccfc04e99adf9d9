//! Certifying that no full-support dependency distribution makes a profile an
//! embedded equilibrium.
//!
//! Off-path actions a' (π^i(a') = 0) use the completed conditional p(·|a'), so
//! the best-response condition E_{p(·|a')}[r^i(a', ·)] ≤ V^i becomes the linear
//! row Σ_{a^{−i}} p(a', a^{−i}) (r^i(a', a^{−i}) − V^i) ≤ 0 after multiplying by
//! p(a') > 0. On-path actions use the profile's own conditionals.

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use ebw_core::{Rational, Scalar};

use crate::error::Result;
use crate::game::{MixedProfile, NormalFormGame};
use crate::simplex::{LinearProgram, LpOutcome, Relation};
use crate::verdict::Witness;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FloorResult {
    pub eta: String,
    pub feasible: bool,
    /// A feasible joint p, keyed by joint action.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<IndexMap<String, String>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymbolicCheck {
    /// Extra payoff allowed on each off-path row.
    pub slack: String,
    /// Joint actions whose mass every solution of the rows sets to zero.
    pub forced_zero: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InfeasibilityReport {
    pub profile: String,
    /// On-path actions that are not best responses under any completion.
    pub on_path_failures: Vec<Witness>,
    pub floors: Vec<FloorResult>,
    pub symbolic: Vec<SymbolicCheck>,
}

impl InfeasibilityReport {
    pub fn infeasible_at_all_floors(&self) -> bool {
        self.floors.iter().all(|f| !f.feasible)
    }
}

/// Best-response rows Σ c·p ≤ 0, one per player and off-path action, with
/// payoffs shifted by V^i + slack.
fn best_response_rows(
    game: &NormalFormGame<Rational>,
    profile: &MixedProfile<Rational>,
    slack: &Rational,
) -> (Vec<Vec<Rational>>, Vec<Witness>) {
    let shape = game.shape();
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for i in 0..game.n_players() {
        let co = game.co_distribution(i, profile);
        let on_path: Vec<usize> = (0..game.n_actions(i)).filter(|&a| profile[i][a].is_positive()).collect();
        let values: Vec<Rational> = on_path.iter().map(|&a| game.expected_payoff_against(i, a, &co)).collect();
        let v = values.iter().cloned().fold(values[0].clone(), Rational::max_of);
        for (&a, q) in on_path.iter().zip(&values) {
            if *q < v {
                failures.push(Witness::deviation(i, format!("on {}", game.action_label(i, a)), "", &(v.clone() - q.clone())));
            }
        }
        for a in (0..game.n_actions(i)).filter(|a| !on_path.contains(a)) {
            let mut row = vec![Rational::from_ratio(0, 1); shape.n_profiles()];
            for c in 0..shape.n_co(i) {
                let p = shape.combine(i, a, c);
                row[shape.index(&p)] = game.payoff(i, &p).clone() - v.clone() - slack.clone();
            }
            rows.push(row);
        }
    }
    (rows, failures)
}

/// Per floor η, whether some joint p ≥ η satisfies every off-path
/// best-response row; plus the symbolic forced-zero analysis at slacks 0 and 1.
pub fn ee_infeasibility_search(
    game: &NormalFormGame<Rational>,
    profile: &MixedProfile<Rational>,
    floors: &[Rational],
) -> Result<InfeasibilityReport> {
    game.check_profile(profile)?;
    let shape = game.shape();
    let n = shape.n_profiles();
    let zero = Rational::from_ratio(0, 1);
    let (rows, failures) = best_response_rows(game, profile, &zero);
    let mut results = Vec::new();
    for eta in floors {
        let budget = Rational::from_ratio(1, 1) - eta.clone() * Rational::from_usize(n);
        let outcome = if !failures.is_empty() || budget < zero {
            LpOutcome::Infeasible
        } else {
            // p = η + y with y ≥ 0.
            let mut lp = LinearProgram::new(n);
            lp.constraint(vec![Rational::from_ratio(1, 1); n], Relation::Eq, budget);
            for row in &rows {
                let shift: Rational = row.iter().map(|c| c.clone() * eta.clone()).sum();
                lp.constraint(row.clone(), Relation::Le, -shift);
            }
            lp.solve()
        };
        let witness = match &outcome {
            LpOutcome::Optimal { x, .. } => Some(
                x.iter()
                    .enumerate()
                    .map(|(idx, y)| (game.profile_label(&shape.decode(idx)), (y.clone() + eta.clone()).token()))
                    .collect(),
            ),
            _ => None,
        };
        results.push(FloorResult {
            eta: eta.token(),
            feasible: outcome.is_feasible(),
            witness,
        });
    }
    let symbolic = [0, 1]
        .iter()
        .map(|&s| forced_zeros(game, profile, &Rational::from_ratio(s, 1)))
        .collect();
    Ok(InfeasibilityReport {
        profile: profile_label(game, profile),
        on_path_failures: failures,
        floors: results,
        symbolic,
    })
}

/// Joint actions x_j with max x_j = 0 over the rows, Σ p = 1 and p ≥ 0.
pub fn forced_zeros(game: &NormalFormGame<Rational>, profile: &MixedProfile<Rational>, slack: &Rational) -> SymbolicCheck {
    let shape = game.shape();
    let n = shape.n_profiles();
    let (rows, _) = best_response_rows(game, profile, slack);
    let mut forced = Vec::new();
    for j in 0..n {
        let mut c = vec![Rational::from_ratio(0, 1); n];
        c[j] = Rational::from_ratio(1, 1);
        let mut lp = LinearProgram::new(n).maximize(c);
        lp.constraint(vec![Rational::from_ratio(1, 1); n], Relation::Eq, Rational::from_ratio(1, 1));
        for row in &rows {
            lp.constraint(row.clone(), Relation::Le, Rational::from_ratio(0, 1));
        }
        let zero = match lp.solve() {
            LpOutcome::Optimal { value, .. } => !value.is_positive(),
            LpOutcome::Infeasible => true,
            LpOutcome::Unbounded => false,
        };
        if zero {
            forced.push(game.profile_label(&shape.decode(j)));
        }
    }
    SymbolicCheck {
        slack: slack.token(),
        forced_zero: forced,
    }
}

fn profile_label(game: &NormalFormGame<Rational>, profile: &MixedProfile<Rational>) -> String {
    profile
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let support: Vec<&str> = (0..s.len()).filter(|&a| s[a].is_positive()).map(|a| game.action_label(i, a)).collect();
            support.join("|")
        })
        .collect::<Vec<_>>()
        .join(",")
}
