//! Prediction-loss ledger: accumulated per-symbol KL and its joint-KL form.

use std::cmp::Ordering;

use ebw_core::logform::LogFormError;
use ebw_core::{History, LogLinear, Scalar, Universe};

use crate::decoupled::PairClass;
use crate::error::{BayesError, Result};
use crate::mixture::CompletionMode;
use crate::similarity::check_fully_supported;

/// Logarithm base used when reporting float values.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum LogBase {
    #[default]
    Nat,
    Bits,
}

/// A sum of c·ln(x) terms: exact under the rational backend, always also as a float.
#[derive(Clone, Debug)]
pub struct LogValue {
    pub exact: Option<LogLinear>,
    pub approx: f64,
}

impl LogValue {
    pub fn zero<P: Scalar>() -> Self {
        LogValue {
            exact: if P::EXACT { Some(LogLinear::zero()) } else { None },
            approx: 0.0,
        }
    }

    /// Adds coef·ln(x) for x > 0.
    pub fn add_term<P: Scalar>(&mut self, coef: &P, x: &P) {
        if coef.is_zero() {
            return;
        }
        if let Some(ex) = &mut self.exact {
            let t = LogLinear::term(coef.to_rational(), &x.to_rational()).expect("positive argument");
            ex.add(&t);
        }
        self.approx += coef.to_f64() * log_f64(x);
    }

    pub fn plus(&self, other: &LogValue) -> LogValue {
        LogValue {
            exact: match (&self.exact, &other.exact) {
                (Some(a), Some(b)) => Some(a.clone().plus(b)),
                _ => None,
            },
            approx: self.approx + other.approx,
        }
    }

    pub fn minus(&self, other: &LogValue) -> LogValue {
        LogValue {
            exact: match (&self.exact, &other.exact) {
                (Some(a), Some(b)) => Some(a.clone().minus(b)),
                _ => None,
            },
            approx: self.approx - other.approx,
        }
    }

    pub fn scaled<P: Scalar>(&self, c: &P) -> LogValue {
        LogValue {
            exact: self.exact.as_ref().map(|e| {
                let mut e = e.clone();
                e.scale(&c.to_rational());
                e
            }),
            approx: self.approx * c.to_f64(),
        }
    }

    pub fn value(&self, base: LogBase) -> f64 {
        match base {
            LogBase::Nat => self.approx,
            LogBase::Bits => self.approx / std::f64::consts::LN_2,
        }
    }

    /// Exact sign when available.
    pub fn exact_sign(&self) -> Option<std::result::Result<Ordering, LogFormError>> {
        self.exact.as_ref().map(|e| e.sign())
    }

    /// Exact equality when available, else `|a − b| ≤ tol`.
    pub fn equals(&self, other: &LogValue, tol: f64) -> bool {
        match (&self.exact, &other.exact) {
            (Some(a), Some(b)) => a.clone().minus(b).is_zero(),
            _ => (self.approx - other.approx).abs() <= tol,
        }
    }

    /// `self ≤ other`, exactly when available, else within `tol`.
    pub fn at_most(&self, other: &LogValue, tol: f64) -> bool {
        match (&self.exact, &other.exact) {
            (Some(a), Some(b)) => matches!(b.clone().minus(a).sign(), Ok(Ordering::Greater | Ordering::Equal)),
            _ => self.approx <= other.approx + tol,
        }
    }
}

fn log_f64<P: Scalar>(x: &P) -> f64 {
    let f = x.to_f64();
    if f > 0.0 && f.is_finite() && f > 1e-300 {
        f.ln()
    } else {
        let r = x.to_rational();
        ebw_core::logform::ln_big(&r.numer().to_biguint().expect("positive"))
            - ebw_core::logform::ln_big(&r.denom().to_biguint().expect("positive"))
    }
}

/// L_n(ρ, λ) and KL(λ(h_1:n) ‖ ρ(h_1:n)), computed independently.
#[derive(Clone, Debug)]
pub struct LossReport {
    pub loss: LogValue,
    pub kl: LogValue,
}

/// −ln w for a prior weight.
pub fn neg_log_weight<P: Scalar>(w: &P) -> LogValue {
    let mut v = LogValue::zero::<P>();
    v.add_term(&(-P::one()), w);
    v
}

/// Accumulated per-symbol prediction loss of ρ on histories drawn from λ.
pub fn prediction_loss<P: Scalar>(rho: &dyn Universe<P>, lambda: &dyn Universe<P>, n: usize) -> Result<LossReport> {
    rho.signature().matches(lambda.signature())?;
    let mut loss = LogValue::zero::<P>();
    let mut kl = LogValue::zero::<P>();
    let rho0 = rho.mass(&History::empty())?;
    walk(rho, lambda, &History::empty(), P::one(), n, &rho0, &mut loss, &mut kl)?;
    Ok(LossReport { loss, kl })
}

#[allow(clippy::too_many_arguments)]
fn walk<P: Scalar>(
    rho: &dyn Universe<P>,
    lambda: &dyn Universe<P>,
    h: &History,
    m: P,
    left: usize,
    rho0: &P,
    loss: &mut LogValue,
    kl: &mut LogValue,
) -> Result<()> {
    if left == 0 {
        let r = rho.mass(h)? / rho0.clone();
        if !r.is_positive() {
            return Err(BayesError::SupportViolation { history: h.clone() });
        }
        kl.add_term(&m, &(m.clone() / r));
        return Ok(());
    }
    let la = lambda.action_dist(h)?;
    let mut ra = None;
    for (a, pa) in la.iter().enumerate() {
        if !pa.is_positive() {
            continue;
        }
        if ra.is_none() {
            ra = Some(rho.action_dist(h).map_err(|_| BayesError::SupportViolation { history: h.clone() })?);
        }
        let qa = ra.as_ref().expect("set")[a].clone();
        if !qa.is_positive() {
            return Err(BayesError::SupportViolation { history: h.clone() });
        }
        let ma = m.clone() * pa.clone();
        loss.add_term(&ma, &(pa.clone() / qa));
        let le = lambda.percept_dist(h, a)?;
        let re = rho
            .percept_dist(h, a)
            .map_err(|_| BayesError::SupportViolation { history: h.clone() })?;
        for (e, pe) in le.iter().enumerate() {
            if !pe.is_positive() {
                continue;
            }
            let qe = re[e].clone();
            if !qe.is_positive() {
                return Err(BayesError::SupportViolation { history: h.extended(a, e) });
            }
            let mae = ma.clone() * pe.clone();
            loss.add_term(&mae, &(pe.clone() / qe));
            walk(rho, lambda, &h.extended(a, e), mae, left - 1, rho0, loss, kl)?;
        }
    }
    Ok(())
}

/// Σ_λ w(λ)(L_n(ρ_d, λ) − L_n(ρ, λ)) next to KL(ρ(h_n) ‖ ρ_d(h_n)).
#[derive(Clone, Debug)]
pub struct LossGapReport {
    pub gap: LogValue,
    pub kl: LogValue,
    /// Per universe with positive weight: (label, L_n(ρ, λ), L_n(ρ_d, λ)).
    pub per_universe: Vec<(String, LogValue, LogValue)>,
}

pub fn avg_loss_gap<P: Scalar>(class: &PairClass<P>, n: usize) -> Result<LossGapReport> {
    check_fully_supported(class, n)?;
    let rho = class.coupled_mixture(CompletionMode::Strict)?;
    let rho_d = class.decoupled_mixture(CompletionMode::Strict)?;
    let total = class.total();
    let mut gap = LogValue::zero::<P>();
    let mut per_universe = Vec::new();
    for (i, row) in class.weights().iter().enumerate() {
        for (j, w) in row.iter().enumerate() {
            if !w.is_positive() {
                continue;
            }
            let lambda = class.universe(i, j)?;
            let l = prediction_loss(&rho, &lambda, n)?.loss;
            let ld = prediction_loss(&rho_d, &lambda, n)?.loss;
            gap = gap.plus(&ld.minus(&l).scaled(&(w.clone() / total.clone())));
            per_universe.push((class.pair_label(i, j), l, ld));
        }
    }
    let r0 = rho.mass(&History::empty())?;
    let d0 = rho_d.mass(&History::empty())?;
    let sig = class.signature();
    let mut kl = LogValue::zero::<P>();
    for h in History::all_of_length(n, sig.n_actions(), sig.n_percepts()) {
        let r = rho.mass(&h)? / r0.clone();
        if !r.is_positive() {
            continue;
        }
        let d = rho_d.mass(&h)? / d0.clone();
        kl.add_term(&r, &(r.clone() / d));
    }
    Ok(LossGapReport { gap, kl, per_universe })
}
