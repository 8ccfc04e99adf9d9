//! Experiment configuration: a TOML document mirroring `ExperimentSpec`.

use std::path::{Path, PathBuf};

use ebw_core::{Rational, Scalar};
use ebw_planning::PlanBudget;
use ebw_scenarios::{Num, ScenarioId, ScenarioParams};
use serde::{Deserialize, Serialize};

use crate::error::{config, HarnessError, Result};

/// How an agent picks its action.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum AgentKind {
    /// Optimal planning against the mixture's percept part.
    EmbeddedBr,
    /// argmax of Q^k with on-policy terminal values.
    KStep { k: usize },
    /// Lowest action within ε_t of max Q^{k_t}; the last entry of each
    /// schedule repeats.
    Approx { k_t: Vec<usize>, eps_t: Vec<Num> },
    /// Optimal planning against the decoupled environment mixture ξ.
    DecoupledBr,
}

impl AgentKind {
    pub fn label(&self) -> String {
        match self {
            AgentKind::EmbeddedBr => "embedded-br".into(),
            AgentKind::KStep { k } => format!("k-step({})", k),
            AgentKind::Approx { .. } => "approx".into(),
            AgentKind::DecoupledBr => "decoupled-br".into(),
        }
    }

    /// Planning depth and slack ε_t at step t (1-based).
    pub fn schedule<P: Scalar>(&self, t: usize) -> Result<(usize, P)> {
        match self {
            AgentKind::Approx { k_t, eps_t } => {
                let k = k_t[(t - 1).min(k_t.len() - 1)];
                let e = eps_t[(t - 1).min(eps_t.len() - 1)].value()?;
                Ok((k, e))
            }
            AgentKind::KStep { k } => Ok((*k, P::zero())),
            _ => Ok((0, P::zero())),
        }
    }
}

/// Planning horizon H or plan tolerance ε_plan.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BudgetSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizon: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub plan_tol: Option<f64>,
}

impl BudgetSpec {
    /// The budget, defaulting to H = 1 when γ = 0 and ε_plan = 1e−6 otherwise.
    pub fn budget(&self, gamma: f64) -> Result<PlanBudget> {
        let b = match (self.horizon, self.plan_tol) {
            (Some(_), Some(_)) => return Err(config("give either horizon or plan_tol, not both")),
            (Some(h), None) => PlanBudget::horizon(h)?,
            (None, Some(e)) => PlanBudget::tolerance(e)?,
            (None, None) if gamma == 0.0 => PlanBudget::horizon(1)?,
            (None, None) => PlanBudget::tolerance(1e-6)?,
        };
        Ok(b.clamped_to_depth())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    /// Belief-closeness threshold of the convergence scan and ε-SEE.
    #[serde(default = "default_eps")]
    pub eps: Num,
    /// Best-response slack δ added to γ^H in tail checks.
    #[serde(default = "default_delta")]
    pub delta: Num,
}

fn default_eps() -> Num {
    Num::new("1/20").expect("valid token")
}

fn default_delta() -> Num {
    Num::new("0").expect("valid token")
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            eps: default_eps(),
            delta: default_delta(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Jsonl,
    Csv,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    #[serde(default)]
    pub format: OutputFormat,
}

/// Ground truth replaced by one outside every agent's class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Injection {
    /// The co-player alternates C, D, C, … regardless of play.
    AlternatingCoPlayer,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub scenario: ScenarioParams,
    /// One entry per player; empty means the scenario's default agents.
    #[serde(default)]
    pub agents: Vec<AgentKind>,
    #[serde(default = "default_rounds")]
    pub rounds: usize,
    #[serde(default)]
    pub budget: BudgetSpec,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default = "default_k_scan")]
    pub k_scan: usize,
    #[serde(default)]
    pub seed: u64,
    /// Seeds of the multi-seed mode; empty means `seed` alone.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub seeds: Vec<u64>,
    /// Rational backend instead of f64.
    #[serde(default)]
    pub exact: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inject: Option<Injection>,
    #[serde(default)]
    pub output: OutputSpec,
}

fn default_rounds() -> usize {
    20
}

fn default_k_scan() -> usize {
    3
}

impl ExperimentSpec {
    pub fn new(scenario: ScenarioParams) -> Self {
        ExperimentSpec {
            scenario,
            agents: Vec::new(),
            rounds: default_rounds(),
            budget: BudgetSpec::default(),
            tolerances: Tolerances::default(),
            k_scan: default_k_scan(),
            seed: 0,
            seeds: Vec::new(),
            exact: false,
            inject: None,
            output: OutputSpec::default(),
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| HarnessError::Parse(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| HarnessError::Parse(e.to_string()))
    }

    pub fn id(&self) -> ScenarioId {
        self.scenario.id
    }

    pub fn n_players(&self) -> usize {
        match self.id() {
            ScenarioId::TwinPd | ScenarioId::CopyPd => 2,
            _ => 1,
        }
    }

    /// The configured agents, or the scenario's defaults.
    pub fn agent_kinds(&self) -> Vec<AgentKind> {
        if !self.agents.is_empty() {
            return self.agents.clone();
        }
        let default = match self.id() {
            ScenarioId::CopyPd => AgentKind::DecoupledBr,
            ScenarioId::MuRk => AgentKind::KStep { k: self.scenario.k() },
            _ => AgentKind::EmbeddedBr,
        };
        vec![default; self.n_players()]
    }

    pub fn gamma_f64(&self) -> Result<f64> {
        Ok(self.scenario.gamma::<Rational>()?.to_f64())
    }

    pub fn plan_budget(&self) -> Result<PlanBudget> {
        self.budget.budget(self.gamma_f64()?)
    }

    pub fn seed_list(&self) -> Vec<u64> {
        if self.seeds.is_empty() {
            vec![self.seed]
        } else {
            self.seeds.clone()
        }
    }

    /// Checks ranges, agent counts and schedules.
    pub fn validate(&self) -> Result<()> {
        self.scenario.validate()?;
        if matches!(self.id(), ScenarioId::Pd | ScenarioId::SeeNotEe) {
            return Err(config(format!("{} is a one-shot game; use verify or scenario", self.id())));
        }
        if self.rounds == 0 {
            return Err(config("rounds must be at least 1"));
        }
        if self.k_scan == 0 {
            return Err(config("k_scan must be at least 1"));
        }
        let agents = self.agent_kinds();
        if agents.len() != self.n_players() {
            return Err(config(format!("{} needs {} agents, got {}", self.id(), self.n_players(), agents.len())));
        }
        for a in &agents {
            match a {
                AgentKind::KStep { k } if *k == 0 => return Err(config("k-step agents need k ≥ 1")),
                AgentKind::Approx { k_t, eps_t } => {
                    for s in [k_t.len(), eps_t.len()] {
                        if s == 0 || (s != 1 && s < self.rounds) {
                            return Err(config("approx schedules need one entry or one per round"));
                        }
                    }
                    if k_t.contains(&0) {
                        return Err(config("approx schedules need k_t ≥ 1"));
                    }
                    for e in eps_t {
                        if e.value::<Rational>()? < Rational::from_ratio(0, 1) {
                            return Err(config("approx schedules need ε_t ≥ 0"));
                        }
                    }
                }
                AgentKind::DecoupledBr if self.n_players() != 2 => {
                    return Err(config("decoupled-br agents need a repeated-game scenario"))
                }
                _ => {}
            }
        }
        if self.inject.is_some() && self.n_players() != 2 {
            return Err(config("truth injection needs a repeated-game scenario"));
        }
        let eps: Rational = self.tolerances.eps.value()?;
        let delta: Rational = self.tolerances.delta.value()?;
        if eps < Rational::from_ratio(0, 1) || delta < Rational::from_ratio(0, 1) {
            return Err(config("tolerances must be nonnegative"));
        }
        self.plan_budget()?;
        Ok(())
    }
}
