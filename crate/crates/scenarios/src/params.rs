//! Scenario identifiers and numeric parameters with their validity ranges.

use std::fmt;
use std::str::FromStr;

use ebw_core::{Rational, Scalar};
use serde::{Deserialize, Deserializer, Serialize};

use crate::error::{out_of_range, Result, ScenarioError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScenarioId {
    /// Repeated Twin PD with the coupled twin prior.
    TwinPd,
    /// Repeated PD with the decoupled ν_copy mixture.
    CopyPd,
    /// μ_{R,k} with k-step and embedded best-response agents.
    MuRk,
    /// Dogmatic mixtures around random deterministic (π, μ).
    Dogmatic,
    /// The 3×3 SEE-but-not-EE game.
    SeeNotEe,
    /// The one-shot prisoner's dilemma.
    Pd,
}

impl ScenarioId {
    pub const ALL: [ScenarioId; 6] = [
        ScenarioId::TwinPd,
        ScenarioId::CopyPd,
        ScenarioId::MuRk,
        ScenarioId::Dogmatic,
        ScenarioId::SeeNotEe,
        ScenarioId::Pd,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            ScenarioId::TwinPd => "twin-pd",
            ScenarioId::CopyPd => "copy-pd",
            ScenarioId::MuRk => "mu-rk",
            ScenarioId::Dogmatic => "dogmatic",
            ScenarioId::SeeNotEe => "see-not-ee",
            ScenarioId::Pd => "pd",
        }
    }
}

impl fmt::Display for ScenarioId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ScenarioId {
    type Err = ScenarioError;

    fn from_str(s: &str) -> Result<Self> {
        ScenarioId::ALL
            .iter()
            .copied()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| ScenarioError::UnknownScenario(s.to_string()))
    }
}

/// A number kept as an exact token; accepts numbers or strings like "2/5".
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct Num(String);

impl Num {
    pub fn new(token: &str) -> Result<Self> {
        Rational::parse_token(token)?;
        Ok(Num(token.to_string()))
    }

    pub fn token(&self) -> &str {
        &self.0
    }

    pub fn value<P: Scalar>(&self) -> Result<P> {
        Ok(P::parse_token(&self.0)?)
    }
}

impl<'de> Deserialize<'de> for Num {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(i64),
            Float(f64),
            Text(String),
        }
        let token = match Raw::deserialize(d)? {
            Raw::Int(n) => n.to_string(),
            Raw::Float(x) => <Rational as Scalar>::from_f64(x).token(),
            Raw::Text(s) => s,
        };
        Num::new(&token).map_err(serde::de::Error::custom)
    }
}

/// Parameters of one scenario; absent fields take the scenario's defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioParams {
    pub id: ScenarioId,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<Num>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<Num>,
    /// Planning depth k of k-step agents and of μ_{R,k}.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<Num>,
    /// Switch-class bound K of the Twin PD.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub class_k: Option<usize>,
    /// Mixture weight of dogmatic mixtures, or the μ_{R,k} perturbation.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps: Option<Num>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub depth: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seeds: Option<Vec<u64>>,
}

impl ScenarioParams {
    pub fn new(id: ScenarioId) -> Self {
        ScenarioParams {
            id,
            alpha: None,
            gamma: None,
            k: None,
            r: None,
            class_k: None,
            eps: None,
            depth: None,
            seeds: None,
        }
    }

    fn num<P: Scalar>(field: &Option<Num>, default: &str) -> Result<P> {
        match field {
            Some(n) => n.value(),
            None => Ok(P::parse_token(default)?),
        }
    }

    pub fn alpha<P: Scalar>(&self) -> Result<P> {
        Self::num(&self.alpha, "2/5")
    }

    pub fn gamma<P: Scalar>(&self) -> Result<P> {
        let default = match self.id {
            ScenarioId::MuRk => "1/2",
            ScenarioId::Dogmatic => "9/10",
            _ => "0",
        };
        Self::num(&self.gamma, default)
    }

    pub fn k(&self) -> usize {
        self.k.unwrap_or(2)
    }

    pub fn r<P: Scalar>(&self) -> Result<P> {
        Self::num(&self.r, "1/5")
    }

    pub fn class_k(&self) -> usize {
        self.class_k.unwrap_or(2)
    }

    pub fn eps<P: Scalar>(&self) -> Result<P> {
        let default = match self.id {
            ScenarioId::Dogmatic => "1/1000",
            _ => "0",
        };
        Self::num(&self.eps, default)
    }

    pub fn depth(&self) -> usize {
        self.depth.unwrap_or(3)
    }

    pub fn seeds(&self) -> Vec<u64> {
        self.seeds.clone().unwrap_or_else(|| (0..20).collect())
    }

    /// Checks the per-scenario validity ranges.
    pub fn validate(&self) -> Result<()> {
        let alpha: Rational = self.alpha()?;
        let gamma: Rational = self.gamma()?;
        let zero = Rational::from_ratio(0, 1);
        let one = Rational::from_ratio(1, 1);
        if gamma < zero || gamma >= one {
            return Err(out_of_range("gamma", &gamma, "0 ≤ γ < 1"));
        }
        match self.id {
            ScenarioId::TwinPd | ScenarioId::CopyPd => {
                if alpha < zero || alpha > one {
                    return Err(out_of_range("alpha", &alpha, "0 ≤ α ≤ 1"));
                }
            }
            ScenarioId::MuRk => {
                let r: Rational = self.r()?;
                if r <= zero || r >= one {
                    return Err(out_of_range("r", &r, "0 < R < 1"));
                }
                if self.k() == 0 {
                    return Err(out_of_range("k", 0, "k ≥ 1"));
                }
                let eps: Rational = self.eps()?;
                if eps < zero || eps > one {
                    return Err(out_of_range("eps", &eps, "0 ≤ η ≤ 1"));
                }
            }
            ScenarioId::Dogmatic => {
                let eps: Rational = self.eps()?;
                if eps <= zero || eps.clone() + eps.clone() * eps.clone() >= one {
                    return Err(out_of_range("eps", &eps, "0 < ε and ε + ε² < 1"));
                }
                if self.depth() == 0 {
                    return Err(out_of_range("depth", 0, "depth ≥ 1"));
                }
            }
            ScenarioId::SeeNotEe | ScenarioId::Pd => {}
        }
        Ok(())
    }
}
