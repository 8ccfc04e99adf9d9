//! Built-in verification suites and serialized verification requests.

use ebw_core::{q, Rational, Scalar};
use ebw_equilibria::{
    check_cee, check_dependency_eq, check_ee_one_shot, check_nash, check_see_one_shot, de_to_cee,
    ee_infeasibility_search, DependencyDistribution, DependencyDoc, GameDoc, InfeasibilityReport, NormalFormGame,
    ParametricJoint, Polynomial, Tolerances, Verdict, Witness,
};
use ebw_scenarios::{prisoner_dilemma, see_not_ee_beliefs, see_not_ee_game, COOPERATE, DEFECT};
use serde::{Deserialize, Serialize};

use crate::error::{config, HarnessError, Result};

pub const VERIFY_SCHEMA: &str = "ebw-verify/1";

/// One verdict with the outcome the suite expects of it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub expect_pass: bool,
    pub verdict: Verdict,
}

impl Check {
    pub fn as_expected(&self) -> bool {
        self.verdict.pass == self.expect_pass
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub checks: Vec<Check>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub infeasibility: Option<InfeasibilityReport>,
}

impl SuiteReport {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(Check::as_expected)
    }
}

fn check(name: &str, expect_pass: bool, verdict: Verdict) -> Check {
    Check {
        name: name.to_string(),
        expect_pass,
        verdict,
    }
}

/// The ε_r-sequence p_r(C,C) = 1 − ε_r, p_r(D,D) = ε_r, whose limit
/// conditionals answer a defection with defection.
pub fn pd_cooperation_sequence(game: &NormalFormGame<Rational>) -> Result<ParametricJoint> {
    Ok(ParametricJoint::new(
        game,
        vec![
            (vec![COOPERATE, COOPERATE], Polynomial(vec![q(1, 1), q(-1, 1)])),
            (vec![DEFECT, DEFECT], Polynomial(vec![q(0, 1), q(1, 1)])),
        ],
    )?)
}

/// Nash, EE and CEE verdicts on the prisoner's dilemma.
pub fn pd_suite() -> Result<SuiteReport> {
    let g = prisoner_dilemma::<Rational>()?;
    let zero = q(0, 1);
    let cc = g.pure_profile(&[COOPERATE, COOPERATE])?;
    let dd = g.pure_profile(&[DEFECT, DEFECT])?;
    let limit = pd_cooperation_sequence(&g)?.limit(&g)?;
    let (device, policies, qc) = de_to_cee(&g, &limit)?;
    let product = DependencyDistribution::product(&g, &dd)?;
    Ok(SuiteReport {
        suite: "pd".into(),
        checks: vec![
            check("nash(C,C)", false, check_nash(&g, &cc, &zero)?),
            check("ee(C,C) with limit completion", true, check_ee_one_shot(&g, &cc, &limit, &zero)?),
            check("dependency(C,C) limit", true, check_dependency_eq(&g, &limit, &zero)?),
            check("cee from dependency(C,C)", true, check_cee(&g, &policies, &device, &qc, &zero)?),
            check("nash(D,D)", true, check_nash(&g, &dd, &zero)?),
            check("ee(D,D) decoupled", true, check_ee_one_shot(&g, &dd, &product, &zero)?),
        ],
        infeasibility: None,
    })
}

/// The 3×3 counterexample: SEE with zero slack, EE infeasible at every floor.
pub fn see_not_ee_suite() -> Result<SuiteReport> {
    let g = see_not_ee_game::<Rational>()?;
    let aa = g.pure_profile(&[0, 0])?;
    let see = check_see_one_shot(&g, &aa, &see_not_ee_beliefs::<Rational>(), &q(0, 1))?;
    let floors = vec![q(1, 100), q(1, 1000), q(1, 10000)];
    let report = ee_infeasibility_search(&g, &aa, &floors)?;
    let mut witnesses = Vec::new();
    for f in &report.floors {
        if f.feasible {
            witnesses.push(Witness::Other {
                player: None,
                detail: format!("feasible at floor {}", f.eta),
            });
        }
    }
    let infeasible = Verdict::new("ee-infeasible", witnesses, Tolerances::default());
    Ok(SuiteReport {
        suite: "see-not-ee".into(),
        checks: vec![check("see(A,A)", true, see), check("ee infeasible at all floors", true, infeasible)],
        infeasibility: Some(report),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Concept {
    Nash,
    Dependency,
    Ee,
    See,
}

/// A serialized equilibrium check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyRequest {
    pub schema: String,
    pub concept: Concept,
    pub game: GameDoc,
    /// Mixed strategy per player, as scalar tokens.
    #[serde(default)]
    pub profile: Vec<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dependency: Option<DependencyDoc>,
    /// `[player][own action][co-player profile]` beliefs for SEE.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beliefs: Option<Vec<Vec<Vec<String>>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps: Option<String>,
}

fn tokens<P: Scalar>(xs: &[String]) -> Result<Vec<P>> {
    Ok(xs.iter().map(|x| P::parse_token(x)).collect::<std::result::Result<_, _>>()?)
}

impl VerifyRequest {
    pub fn from_json(text: &str) -> Result<Self> {
        let r: VerifyRequest = serde_json::from_str(text).map_err(|e| HarnessError::Parse(e.to_string()))?;
        if r.schema != VERIFY_SCHEMA {
            return Err(HarnessError::Parse(format!("unknown schema {:?}", r.schema)));
        }
        Ok(r)
    }

    /// Runs the check with the given backend; `eps_override` replaces the
    /// document's tolerance.
    pub fn run<P: Scalar>(&self, eps_override: Option<&str>) -> Result<Verdict> {
        let game = NormalFormGame::<P>::from_doc(&self.game)?;
        let eps = P::parse_token(eps_override.or(self.eps.as_deref()).unwrap_or("0"))?;
        let profile = || -> Result<Vec<Vec<P>>> {
            if self.profile.len() != game.n_players() {
                return Err(config("profile needs one strategy per player"));
            }
            self.profile.iter().map(|s| tokens(s)).collect()
        };
        let dependency = || -> Result<DependencyDistribution<P>> {
            let doc = self.dependency.as_ref().ok_or_else(|| config("this concept needs a dependency document"))?;
            Ok(DependencyDistribution::from_doc(&game, doc)?)
        };
        Ok(match self.concept {
            Concept::Nash => check_nash(&game, &profile()?, &eps)?,
            Concept::Dependency => check_dependency_eq(&game, &dependency()?, &eps)?,
            Concept::Ee => check_ee_one_shot(&game, &profile()?, &dependency()?, &eps)?,
            Concept::See => {
                let raw = self.beliefs.as_ref().ok_or_else(|| config("see needs beliefs"))?;
                let beliefs = raw
                    .iter()
                    .map(|rows| rows.iter().map(|r| tokens(r)).collect::<Result<Vec<_>>>())
                    .collect::<Result<Vec<_>>>()?;
                check_see_one_shot(&game, &profile()?, &beliefs, &eps)?
            }
        })
    }
}

/// A request for the prisoner's dilemma at a pure profile.
pub fn pd_request(concept: Concept, actions: [usize; 2]) -> Result<VerifyRequest> {
    let g = prisoner_dilemma::<Rational>()?;
    let profile = g.pure_profile(&actions)?;
    let dependency = match concept {
        Concept::Dependency | Concept::Ee => Some(if actions == [COOPERATE, COOPERATE] {
            pd_cooperation_sequence(&g)?.limit(&g)?.to_doc(&g)
        } else {
            DependencyDistribution::product(&g, &profile)?.to_doc(&g)
        }),
        _ => None,
    };
    Ok(VerifyRequest {
        schema: VERIFY_SCHEMA.into(),
        concept,
        game: g.to_doc(),
        profile: profile.iter().map(|s| s.iter().map(|x| x.token()).collect()).collect(),
        dependency,
        beliefs: None,
        eps: None,
    })
}
