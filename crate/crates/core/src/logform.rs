//! Exact arithmetic on sums Σ c_i·ln(x_i) with rational c_i and x_i.
//!
//! Arguments are refined into a pairwise coprime base; logarithms of pairwise
//! coprime integers > 1 are linearly independent over ℚ, so a form is zero
//! exactly when every coefficient on the base vanishes. The sign of a nonzero
//! form is decided by interval evaluation at increasing precision.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::sync::OnceLock;
use std::fmt;

use num::bigint::{BigInt, BigUint};
use num::{BigRational, Integer, One, Signed, ToPrimitive, Zero};

use crate::scalar::Rational;

/// Σ c·ln(b) over positive integer bases b.
#[derive(Clone, Debug, Default)]
pub struct LogLinear {
    terms: Vec<(BigUint, Rational)>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LogFormError {
    #[error("logarithm of a non-positive value {0}")]
    NonPositive(String),
    #[error("sign undecided at {0} bits")]
    Undecided(usize),
}

impl LogLinear {
    pub fn zero() -> Self {
        LogLinear { terms: Vec::new() }
    }

    /// c·ln(x) for a positive rational x.
    pub fn term(c: Rational, x: &Rational) -> Result<Self, LogFormError> {
        if !x.is_positive() {
            return Err(LogFormError::NonPositive(x.to_string()));
        }
        let mut out = LogLinear::zero();
        if c.is_zero() {
            return Ok(out);
        }
        let n = x.numer().to_biguint().expect("positive");
        let d = x.denom().to_biguint().expect("positive");
        if !n.is_one() {
            out.terms.push((n, c.clone()));
        }
        if !d.is_one() {
            out.terms.push((d, -c));
        }
        Ok(out)
    }

    pub fn ln(x: &Rational) -> Result<Self, LogFormError> {
        Self::term(Rational::one(), x)
    }

    pub fn add(&mut self, other: &LogLinear) {
        self.terms.extend(other.terms.iter().cloned());
    }

    pub fn sub(&mut self, other: &LogLinear) {
        self.terms
            .extend(other.terms.iter().map(|(b, c)| (b.clone(), -c.clone())));
    }

    pub fn scale(&mut self, c: &Rational) {
        for t in &mut self.terms {
            t.1 = t.1.clone() * c.clone();
        }
    }

    pub fn plus(mut self, other: &LogLinear) -> Self {
        self.add(other);
        self
    }

    pub fn minus(mut self, other: &LogLinear) -> Self {
        self.sub(other);
        self
    }

    /// Coefficients on a pairwise coprime base, zero entries dropped, sorted by base.
    pub fn normalized(&self) -> Vec<(BigUint, Rational)> {
        let mut merged: HashMap<BigUint, Rational> = HashMap::new();
        for (b, c) in &self.terms {
            let slot = merged.entry(b.clone()).or_insert_with(Rational::zero);
            *slot = slot.clone() + c.clone();
        }
        // Small primes first; only the large cofactors need gcd refinement.
        let mut coeffs: HashMap<BigUint, Rational> = HashMap::new();
        let mut rest: Vec<(BigUint, Rational)> = Vec::new();
        for (b, c) in merged {
            if c.is_zero() {
                continue;
            }
            let mut r = b;
            for &p in small_primes() {
                let pb = BigUint::from(p);
                let mut e = 0u64;
                while (&r % &pb).is_zero() {
                    r /= &pb;
                    e += 1;
                }
                if e > 0 {
                    let slot = coeffs.entry(pb).or_insert_with(Rational::zero);
                    *slot = slot.clone() + c.clone() * BigRational::from_integer(BigInt::from(e));
                }
            }
            if !r.is_one() {
                rest.push((r, c));
            }
        }
        let mut bases: Vec<BigUint> = rest.iter().map(|t| t.0.clone()).collect();
        bases.sort();
        bases.dedup();
        let basis = coprime_basis(&bases);
        for (b, c) in &rest {
            for (k, e) in factor_over(b, &basis).into_iter().enumerate() {
                if e > 0 {
                    let slot = coeffs.entry(basis[k].clone()).or_insert_with(Rational::zero);
                    *slot = slot.clone() + c.clone() * BigRational::from_integer(BigInt::from(e));
                }
            }
        }
        let mut out: Vec<(BigUint, Rational)> = coeffs.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        out.sort_by(|a, b| a.0.cmp(&b.0));
        out
    }

    /// Exact test for the zero form.
    pub fn is_zero(&self) -> bool {
        self.normalized().is_empty()
    }

    pub fn to_f64(&self) -> f64 {
        self.terms
            .iter()
            .map(|(b, c)| crate::scalar::ratio_to_f64(c) * ln_big(b))
            .sum()
    }

    /// Exact sign of the form.
    pub fn sign(&self) -> Result<Ordering, LogFormError> {
        let terms = self.normalized();
        if terms.is_empty() {
            return Ok(Ordering::Equal);
        }
        let mut bits = 64;
        while bits <= 8192 {
            let (lo, hi) = interval(&terms, bits);
            if lo.is_positive() {
                return Ok(Ordering::Greater);
            }
            if hi.is_negative() {
                return Ok(Ordering::Less);
            }
            bits *= 2;
        }
        Err(LogFormError::Undecided(bits / 2))
    }

    /// Exact comparison of two forms.
    pub fn compare(&self, other: &LogLinear) -> Result<Ordering, LogFormError> {
        self.clone().minus(other).sign()
    }
}

impl fmt::Display for LogLinear {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms = self.normalized();
        if terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = terms.iter().map(|(b, c)| format!("({})·ln {}", c, b)).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Pairwise coprime integers > 1 such that every input is a product of their powers.
pub fn coprime_basis(nums: &[BigUint]) -> Vec<BigUint> {
    let mut basis: Vec<BigUint> = Vec::new();
    let mut pending: Vec<BigUint> = nums.iter().filter(|n| **n > BigUint::one()).cloned().collect();
    loop {
        while let Some(x) = pending.pop() {
            if x <= BigUint::one() {
                continue;
            }
            match basis.iter().position(|b| !b.gcd(&x).is_one()) {
                None => basis.push(x),
                Some(i) => {
                    let b = basis.swap_remove(i);
                    if b == x {
                        basis.push(b);
                        continue;
                    }
                    let g = b.gcd(&x);
                    pending.push(&b / &g);
                    pending.push(&x / &g);
                    pending.push(g);
                }
            }
        }
        // Any input left with a remainder forces further splitting.
        let mut again = false;
        for n in nums {
            if *n <= BigUint::one() {
                continue;
            }
            let mut r = n.clone();
            for b in &basis {
                while (&r % b).is_zero() {
                    r /= b;
                }
            }
            if !r.is_one() {
                pending.push(r);
                again = true;
            }
        }
        if !again {
            break;
        }
    }
    basis.sort();
    basis
}

fn factor_over(x: &BigUint, basis: &[BigUint]) -> Vec<u64> {
    let mut r = x.clone();
    basis
        .iter()
        .map(|b| {
            let mut e = 0;
            while (&r % b).is_zero() {
                r /= b;
                e += 1;
            }
            e
        })
        .collect()
}

fn small_primes() -> &'static [u32] {
    static PRIMES: OnceLock<Vec<u32>> = OnceLock::new();
    PRIMES.get_or_init(|| {
        const N: usize = 2000;
        let mut sieve = vec![true; N];
        let mut out = Vec::new();
        for i in 2..N {
            if sieve[i] {
                out.push(i as u32);
                let mut j = i * i;
                while j < N {
                    sieve[j] = false;
                    j += i;
                }
            }
        }
        out
    })
}

/// Natural log of a big integer in floating point.
pub fn ln_big(b: &BigUint) -> f64 {
    let bits = b.bits();
    if bits <= 1000 {
        if let Some(f) = b.to_f64() {
            return f.ln();
        }
    }
    let shift = bits - 60;
    let top = (b >> shift as usize).to_f64().unwrap_or(1.0);
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// Rigorous enclosure of Σ c·ln b with dyadic bounds at `bits` precision.
fn interval(terms: &[(BigUint, Rational)], bits: usize) -> (Rational, Rational) {
    let q = bits + 16;
    let scale = BigRational::from_integer(BigInt::one() << q);
    let (ln2_lo, ln2_hi) = atanh_bounds(&BigUint::one(), &BigUint::from(3u32), q);
    let mut lo = Rational::zero();
    let mut hi = Rational::zero();
    for (b, c) in terms {
        let k = b.bits() - 1;
        let p2 = BigUint::one() << k as usize;
        let (zl, zh) = atanh_bounds(&(b - &p2), &(b + &p2), q);
        let kk = BigInt::from(k);
        let two = BigInt::from(2);
        // ln b = 2k·atanh(1/3) + 2·atanh(z)
        let l = BigRational::new(two.clone() * (&kk * &ln2_lo + &zl), BigInt::one()) / scale.clone();
        let h = BigRational::new(two * (&kk * &ln2_hi + &zh), BigInt::one()) / scale.clone();
        if c.is_positive() {
            lo = lo + c.clone() * l;
            hi = hi + c.clone() * h;
        } else {
            lo = lo + c.clone() * h;
            hi = hi + c.clone() * l;
        }
    }
    (lo, hi)
}

/// Integer bounds (in units of 2^-q) on atanh(num/den) for 0 ≤ num/den ≤ 1/3.
fn atanh_bounds(num: &BigUint, den: &BigUint, q: usize) -> (BigInt, BigInt) {
    let num = BigInt::from(num.clone());
    let den = BigInt::from(den.clone());
    if num.is_zero() {
        return (BigInt::zero(), BigInt::zero());
    }
    let zl = (&num << q).div_floor(&den);
    let zh = &zl + BigInt::one();
    let terms = q / 3 + 4;
    let sum = |z: &BigInt, up: bool| -> BigInt {
        let z2 = if up {
            ceil_shift(&(z * z), q)
        } else {
            (z * z) >> q
        };
        let mut pow = z.clone();
        let mut acc = BigInt::zero();
        for j in 0..terms {
            let d = BigInt::from(2 * j + 1);
            acc += if up { ceil_div(&pow, &d) } else { pow.div_floor(&d) };
            pow = if up {
                ceil_shift(&(&pow * &z2), q)
            } else {
                (&pow * &z2) >> q
            };
        }
        if up {
            // Geometric tail with ratio ≤ z² ≤ 1/8 (z slightly above 1/3 at most).
            acc += ceil_div(&(&pow * BigInt::from(2)), &BigInt::from(2 * terms + 1)) + BigInt::one();
        }
        acc
    };
    (sum(&zl, false), sum(&zh, true))
}

fn ceil_div(a: &BigInt, b: &BigInt) -> BigInt {
    let (d, r) = a.div_mod_floor(b);
    if r.is_zero() {
        d
    } else {
        d + BigInt::one()
    }
}

fn ceil_shift(a: &BigInt, q: usize) -> BigInt {
    ceil_div(a, &(BigInt::one() << q))
}
