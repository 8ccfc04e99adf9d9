//! Discount, rewards, horizon budgets and value certificates.

use ebw_core::{Alphabet, Percept, Scalar};

use crate::error::{PlanningError, Result};

/// Discount factor and reward per percept index.
#[derive(Clone, Debug, PartialEq)]
pub struct DiscountedTask<P: Scalar> {
    gamma: P,
    rewards: Vec<P>,
}

impl<P: Scalar> DiscountedTask<P> {
    pub fn new(gamma: P, rewards: Vec<P>) -> Result<Self> {
        if gamma < P::zero() || gamma >= P::one() {
            return Err(PlanningError::InvalidTask(format!("discount {} outside [0,1)", gamma)));
        }
        if rewards.iter().any(|r| *r < P::zero() || *r > P::one()) {
            return Err(PlanningError::InvalidTask("rewards must lie in [0,1]".into()));
        }
        Ok(DiscountedTask { gamma, rewards })
    }

    /// Rewards read from percept labels of the form "observation:reward".
    pub fn from_percepts(gamma: P, percepts: &Alphabet) -> Result<Self> {
        let rewards = percepts
            .labels()
            .iter()
            .map(|l| Percept::<P>::parse(l).map(|p| p.reward))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        Self::new(gamma, rewards)
    }

    pub fn gamma(&self) -> &P {
        &self.gamma
    }

    pub fn rewards(&self) -> &[P] {
        &self.rewards
    }

    pub fn reward(&self, e: usize) -> &P {
        &self.rewards[e]
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum BudgetKind {
    Horizon(usize),
    Tolerance(f64),
}

/// Planning horizon, given directly or through a tolerance ε with H = ⌈log ε / log γ⌉.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PlanBudget {
    kind: BudgetKind,
    clamp: bool,
}

impl PlanBudget {
    pub fn horizon(h: usize) -> Result<Self> {
        if h == 0 {
            return Err(PlanningError::InvalidBudget("horizon must be at least 1".into()));
        }
        Ok(PlanBudget {
            kind: BudgetKind::Horizon(h),
            clamp: false,
        })
    }

    pub fn tolerance(eps: f64) -> Result<Self> {
        if !(eps > 0.0 && eps < 1.0) {
            return Err(PlanningError::InvalidBudget(format!("plan tolerance {} outside (0,1)", eps)));
        }
        Ok(PlanBudget {
            kind: BudgetKind::Tolerance(eps),
            clamp: false,
        })
    }

    /// Shortens the horizon to the model's remaining depth instead of failing.
    pub fn clamped_to_depth(mut self) -> Self {
        self.clamp = true;
        self
    }

    pub fn is_clamped(&self) -> bool {
        self.clamp
    }

    /// Horizon for discount `gamma` (1 when γ = 0).
    pub fn steps(&self, gamma: f64) -> usize {
        match self.kind {
            BudgetKind::Horizon(h) => h,
            BudgetKind::Tolerance(eps) => {
                if gamma <= 0.0 {
                    1
                } else {
                    let x = eps.ln() / gamma.ln();
                    ((x - 1e-9).ceil() as usize).max(1)
                }
            }
        }
    }

    /// Horizon used at a history of length `len` in a model of depth `depth`.
    pub fn effective(&self, gamma: f64, len: usize, depth: usize) -> Result<usize> {
        let h = self.steps(gamma);
        let room = depth.saturating_sub(len);
        if h <= room {
            Ok(h)
        } else if self.clamp && room > 0 {
            Ok(room)
        } else {
            Err(PlanningError::DepthExceeded { len, horizon: h, depth })
        }
    }
}

/// A normalized value with its truncation certificate γ^H.
#[derive(Clone, Debug, PartialEq)]
pub struct ValueEstimate<P: Scalar> {
    pub value: P,
    pub error_bound: P,
    pub horizon: usize,
    /// Self-model nodes with undefined conditionals, treated as terminated.
    pub terminated: u64,
}

#[cfg(test)]
mod tests {
    use super::*;
    use ebw_core::{q, Rational};

    #[test]
    fn tolerance_horizon() {
        let b = PlanBudget::tolerance(1e-6).unwrap();
        assert_eq!(b.steps(0.5), 20);
        assert_eq!(b.steps(0.0), 1);
        assert_eq!(PlanBudget::tolerance(0.25).unwrap().steps(0.5), 2);
    }

    #[test]
    fn depth_limits() {
        let b = PlanBudget::horizon(5).unwrap();
        assert!(b.effective(0.5, 2, 6).is_err());
        assert_eq!(b.clamped_to_depth().effective(0.5, 2, 6).unwrap(), 4);
        assert_eq!(b.effective(0.5, 1, 6).unwrap(), 5);
    }

    #[test]
    fn task_validation() {
        assert!(DiscountedTask::new(q(1, 1), vec![q(0, 1)]).is_err());
        assert!(DiscountedTask::new(q(1, 2), vec![q(3, 2)]).is_err());
        let pa = Alphabet::percepts(&["D:1/3", "C:1"]).unwrap();
        let t = DiscountedTask::<Rational>::from_percepts(q(0, 1), &pa).unwrap();
        assert_eq!(t.rewards(), &[q(1, 3), q(1, 1)]);
    }
}
