//! Number representations.
//!
//! Affine maps are handled entirely in exact rational arithmetic. Smooth
//! branches and the long float iterations (ω-limit covers, Ulam power
//! iteration) use `f64`; every comparison in that mode goes through an
//! explicit absolute tolerance.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exact rational number used for every quantity of an affine map.
pub type Rational = BigRational;

/// Absolute tolerance used by float-mode comparisons unless overridden.
pub const DEFAULT_FLOAT_TOL: f64 = 1e-12;

/// A real quantity, either exact or a binary float.
#[derive(Clone, Debug, PartialEq)]
pub enum Scalar {
    Exact(Rational),
    Float(f64),
}

impl Scalar {
    pub fn is_exact(&self) -> bool {
        matches!(self, Scalar::Exact(_))
    }

    pub fn as_exact(&self) -> Option<&Rational> {
        match self {
            Scalar::Exact(q) => Some(q),
            Scalar::Float(_) => None,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Scalar::Exact(q) => to_f64(q),
            Scalar::Float(v) => *v,
        }
    }

    /// Compares two scalars. Exact pairs compare with no rounding; as soon as
    /// one side is a float both are compared as floats and values within
    /// `tol` are reported equal.
    pub fn cmp_tol(&self, other: &Scalar, tol: f64) -> Ordering {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => a.cmp(b),
            _ => {
                let (a, b) = (self.to_f64(), other.to_f64());
                if (a - b).abs() <= tol {
                    Ordering::Equal
                } else if a < b {
                    Ordering::Less
                } else {
                    Ordering::Greater
                }
            }
        }
    }

    pub fn abs(&self) -> Scalar {
        match self {
            Scalar::Exact(q) => Scalar::Exact(q.abs()),
            Scalar::Float(v) => Scalar::Float(v.abs()),
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(q) => write!(f, "{}", fmt_rational(q)),
            Scalar::Float(v) => write!(f, "{v}"),
        }
    }
}

impl From<Rational> for Scalar {
    fn from(q: Rational) -> Self {
        Scalar::Exact(q)
    }
}

/// `p/q` shorthand used throughout tests and fixtures.
pub fn rat(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

pub fn int(p: i64) -> Rational {
    Rational::from_integer(BigInt::from(p))
}

pub fn to_f64(q: &Rational) -> f64 {
    if let Some(v) = q.to_f64() {
        if v.is_finite() {
            return v;
        }
    }
    // Very large numerators/denominators: scale both down first.
    let (n, d) = (q.numer(), q.denom());
    let shift = n.bits().max(d.bits()).saturating_sub(1000);
    let n = (n >> shift).to_f64().unwrap_or(f64::NAN);
    let d = (d >> shift).to_f64().unwrap_or(f64::NAN);
    n / d
}

/// Serializes as `p/q`, or `p` when the denominator is one.
pub fn fmt_rational(q: &Rational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Parses `p/q`, an integer, or a decimal literal (`0.65`, `-1.5e-2`) into
/// an exact rational. Decimals are converted exactly, never through `f64`.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let s = text.trim();
    let bad = || Error::Number(s.to_string());
    if s.is_empty() {
        return Err(bad());
    }
    if let Some((p, q)) = s.split_once('/') {
        let p = BigInt::from_str(p.trim()).map_err(|_| bad())?;
        let q = BigInt::from_str(q.trim()).map_err(|_| bad())?;
        if q.is_zero() {
            return Err(bad());
        }
        return Ok(Rational::new(p, q));
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (whole, frac) = digits.split_once('.').unwrap_or((digits, ""));
    if whole.is_empty() && frac.is_empty() {
        return Err(bad());
    }
    if !whole.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let all: String = format!("{whole}{frac}");
    let numer = BigInt::from_str(if all.is_empty() { "0" } else { &all }).map_err(|_| bad())?;
    let scale = exponent - frac.len() as i32;
    let ten = BigInt::from(10);
    let mut value = if scale >= 0 {
        Rational::from_integer(numer * num_traits::pow(ten, scale as usize))
    } else {
        Rational::new(numer, num_traits::pow(ten, (-scale) as usize))
    };
    if negative {
        value = -value;
    }
    Ok(value)
}

/// A natural logarithm held exactly as `ln(arg)` with `arg > 0` rational.
///
/// Sums of logs are products of arguments, so quantities like
/// `Var(ln|Df|)` and `e^{S(K+LM)}` stay exact for affine maps.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LogValue {
    arg: Rational,
}

impl LogValue {
    pub fn zero() -> Self {
        LogValue { arg: Rational::one() }
    }

    /// `ln(arg)`; panics when `arg <= 0`.
    pub fn ln(arg: Rational) -> Self {
        assert!(arg.is_positive(), "logarithm of a non-positive number");
        LogValue { arg }
    }

    /// `|ln(a) - ln(b)|` for positive `a`, `b`.
    pub fn abs_diff(a: &Rational, b: &Rational) -> Self {
        let r = a / b;
        if r >= Rational::one() {
            LogValue::ln(r)
        } else {
            LogValue::ln(r.recip())
        }
    }

    /// The exact value of `exp(self)`.
    pub fn exp(&self) -> &Rational {
        &self.arg
    }

    pub fn add(&self, other: &LogValue) -> LogValue {
        LogValue { arg: &self.arg * &other.arg }
    }

    pub fn scale(&self, k: u32) -> LogValue {
        LogValue { arg: num_traits::pow(self.arg.clone(), k as usize) }
    }

    pub fn to_f64(&self) -> f64 {
        let (n, d) = (self.arg.numer(), self.arg.denom());
        ln_bigint(n) - ln_bigint(d)
    }
}

impl PartialOrd for LogValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for LogValue {
    fn cmp(&self, other: &Self) -> Ordering {
        self.arg.cmp(&other.arg)
    }
}

impl fmt::Display for LogValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ln({})", fmt_rational(&self.arg))
    }
}

fn ln_bigint(n: &BigInt) -> f64 {
    let bits = n.bits();
    if bits < 1000 {
        return n.to_f64().unwrap_or(f64::NAN).ln();
    }
    let shift = bits - 64;
    (n >> shift).to_f64().unwrap_or(f64::NAN).ln() + shift as f64 * std::f64::consts::LN_2
}
