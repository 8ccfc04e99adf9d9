//! Numeric backends: exact rationals and 64-bit floats behind one trait.

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num::bigint::BigInt;
use num::{BigRational, FromPrimitive, One, Signed, ToPrimitive, Zero};

use crate::error::CoreError;

pub type Rational = BigRational;

/// Field operations plus the conversions the workbench needs.
pub trait Scalar:
    Clone
    + Debug
    + Display
    + PartialEq
    + PartialOrd
    + Send
    + Sync
    + 'static
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Sum
{
    /// True for the rational backend.
    const EXACT: bool;
    /// Name used in serialized documents.
    const BACKEND: &'static str;

    fn from_ratio(n: i64, d: i64) -> Self;
    fn from_f64(x: f64) -> Self;
    fn to_f64(&self) -> f64;
    /// Exact rational value (every float is a dyadic rational).
    fn to_rational(&self) -> Rational;
    /// Parses "3/4", "0.25", "1e-3" or an integer. Decimal input is read exactly
    /// by the rational backend.
    fn parse_token(s: &str) -> Result<Self, CoreError>;
    /// Canonical text form; `parse_token(x.token()) == x` bit for bit.
    fn token(&self) -> String;

    fn from_usize(n: usize) -> Self {
        Self::from_ratio(n as i64, 1)
    }

    fn abs_val(&self) -> Self {
        if *self < Self::zero() {
            -self.clone()
        } else {
            self.clone()
        }
    }

    fn pow(&self, n: usize) -> Self {
        let mut out = Self::one();
        for _ in 0..n {
            out = out * self.clone();
        }
        out
    }

    fn max_of(a: Self, b: Self) -> Self {
        if b > a {
            b
        } else {
            a
        }
    }

    fn min_of(a: Self, b: Self) -> Self {
        if b < a {
            b
        } else {
            a
        }
    }

    /// Equality up to `tol` for floats, exact for rationals.
    fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        if Self::EXACT {
            self == other
        } else {
            (self.to_f64() - other.to_f64()).abs() <= tol
        }
    }

    fn is_positive(&self) -> bool {
        *self > Self::zero()
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;
    const BACKEND: &'static str = "float";

    fn from_ratio(n: i64, d: i64) -> Self {
        n as f64 / d as f64
    }

    fn from_f64(x: f64) -> Self {
        x
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn to_rational(&self) -> Rational {
        BigRational::from_float(*self).unwrap_or_else(BigRational::zero)
    }

    fn parse_token(s: &str) -> Result<Self, CoreError> {
        let s = s.trim();
        if let Some((n, d)) = s.split_once('/') {
            let n: f64 = n.trim().parse().map_err(|_| CoreError::Parse(s.to_string()))?;
            let d: f64 = d.trim().parse().map_err(|_| CoreError::Parse(s.to_string()))?;
            if d == 0.0 {
                return Err(CoreError::Parse(s.to_string()));
            }
            return Ok(n / d);
        }
        s.parse().map_err(|_| CoreError::Parse(s.to_string()))
    }

    fn token(&self) -> String {
        // Display for f64 prints the shortest string that round-trips.
        format!("{}", self)
    }
}

impl Scalar for Rational {
    const EXACT: bool = true;
    const BACKEND: &'static str = "rational";

    fn from_ratio(n: i64, d: i64) -> Self {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn from_f64(x: f64) -> Self {
        // Go through the shortest decimal form so 0.4 becomes 2/5, not the
        // binary approximation.
        parse_decimal(&format!("{}", x)).unwrap_or_else(|| {
            BigRational::from_float(x).unwrap_or_else(BigRational::zero)
        })
    }

    fn to_f64(&self) -> f64 {
        ratio_to_f64(self)
    }

    fn to_rational(&self) -> Rational {
        self.clone()
    }

    fn parse_token(s: &str) -> Result<Self, CoreError> {
        let s = s.trim();
        if let Some((n, d)) = s.split_once('/') {
            let n = BigInt::from_str(n.trim()).map_err(|_| CoreError::Parse(s.to_string()))?;
            let d = BigInt::from_str(d.trim()).map_err(|_| CoreError::Parse(s.to_string()))?;
            if d.is_zero() {
                return Err(CoreError::Parse(s.to_string()));
            }
            return Ok(BigRational::new(n, d));
        }
        parse_decimal(s).ok_or_else(|| CoreError::Parse(s.to_string()))
    }

    fn token(&self) -> String {
        if self.denom().is_one() {
            self.numer().to_string()
        } else {
            format!("{}/{}", self.numer(), self.denom())
        }
    }
}

/// Exact parse of a decimal literal with optional exponent.
fn parse_decimal(s: &str) -> Option<Rational> {
    let s = s.trim();
    if s.is_empty() {
        return None;
    }
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (neg, mantissa) = match mantissa.strip_prefix('-') {
        Some(m) => (true, m),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = match mantissa.split_once('.') {
        Some((i, f)) => (i, f),
        None => (mantissa, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{}{}", int_part, frac_part);
    let mut numer = BigInt::from_str(if digits.is_empty() { "0" } else { &digits }).ok()?;
    if neg {
        numer = -numer;
    }
    let scale = exp - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let value = if scale >= 0 {
        BigRational::from_integer(numer * num::pow(ten, scale as usize))
    } else {
        BigRational::new(numer, num::pow(ten, (-scale) as usize))
    };
    Some(value)
}

/// Float value of a rational that may have numerator and denominator far
/// outside the f64 range.
pub fn ratio_to_f64(r: &Rational) -> f64 {
    if let (Some(n), Some(d)) = (r.numer().to_f64(), r.denom().to_f64()) {
        if n.is_finite() && d.is_finite() && d != 0.0 {
            return n / d;
        }
    }
    let nb = r.numer().bits() as i64;
    let db = r.denom().bits() as i64;
    // Shift both to about 60 significant bits before dividing.
    let shift_n = (nb - 60).max(0);
    let shift_d = (db - 60).max(0);
    let n = (r.numer().abs() >> shift_n as usize).to_f64().unwrap_or(0.0);
    let d = (r.denom() >> shift_d as usize).to_f64().unwrap_or(1.0);
    let v = (n / d) * 2f64.powi((shift_n - shift_d) as i32);
    if r.is_negative() {
        -v
    } else {
        v
    }
}

/// Convenience constructor for exact constants in code and tests.
pub fn q(n: i64, d: i64) -> Rational {
    Rational::from_ratio(n, d)
}

/// Sum of a slice of scalars.
pub fn total<P: Scalar>(xs: &[P]) -> P {
    xs.iter().cloned().sum()
}

pub fn rational_from_u64(n: u64) -> Rational {
    BigRational::from_integer(BigInt::from_u64(n).unwrap_or_default())
}
