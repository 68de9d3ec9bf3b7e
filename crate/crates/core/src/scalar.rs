//! Numeric regimes.
//!
//! Computations are generic over [`Field`], implemented by [`Rational`]
//! (arbitrary precision, exact) and `f64`. Exact values compare with `==`;
//! floating point values only compare through a [`Tolerance`]. The dynamic
//! [`Scalar`] wrapper exists for data that arrives untyped (JSON, CLI flags)
//! and keeps regimes apart at runtime.

use alloc::format;
use alloc::string::{String, ToString};
use core::fmt;
use core::str::FromStr;

use num_bigint::BigInt;
use num_traits::{FromPrimitive, Signed, ToPrimitive, Zero};

use crate::{Error, Result};

pub type Rational = num_rational::BigRational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    Exact,
    Float,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Regime::Exact => "exact",
            Regime::Float => "float",
        })
    }
}

/// Relative/absolute tolerance pair used for every floating point comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub rel: f64,
    pub abs: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance { rel: 1e-9, abs: 1e-12 }
    }
}

impl Tolerance {
    pub const fn new(rel: f64, abs: f64) -> Self {
        Tolerance { rel, abs }
    }

    /// `|a - b| <= abs + rel * max(|a|, |b|)`
    pub fn eq(&self, a: f64, b: f64) -> bool {
        let scale = libm::fmax(libm::fabs(a), libm::fabs(b));
        libm::fabs(a - b) <= self.abs + self.rel * scale
    }

    /// Zero test against a caller supplied magnitude.
    pub fn is_zero(&self, value: f64, scale: f64) -> bool {
        libm::fabs(value) <= self.abs + self.rel * libm::fabs(scale)
    }
}

/// Ordered field with the operations the invariant computations need.
pub trait Field:
    Clone + fmt::Debug + fmt::Display + PartialOrd + Signed + FromPrimitive + Send + Sync + 'static
{
    const REGIME: Regime;

    fn from_int(v: i64) -> Self {
        Self::from_i64(v).expect("every i64 is representable")
    }

    fn ratio(num: i64, den: i64) -> Self {
        Self::from_int(num) / Self::from_int(den)
    }

    fn as_f64(&self) -> f64;

    /// Exact for rationals, nearest float otherwise.
    fn from_rational(q: &Rational) -> Self;

    /// Equality: exact for rationals, tolerance based for floats.
    fn approx_eq(&self, other: &Self, tol: &Tolerance) -> bool;

    /// Zero test relative to `scale` (ignored in the exact regime).
    fn approx_zero(&self, scale: &Self, tol: &Tolerance) -> bool;

    fn is_finite_value(&self) -> bool;

    fn sq(&self) -> Self {
        self.clone() * self.clone()
    }

    fn cube(&self) -> Self {
        self.clone() * self.clone() * self.clone()
    }
}

impl Field for Rational {
    const REGIME: Regime = Regime::Exact;

    fn as_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn from_rational(q: &Rational) -> Self {
        q.clone()
    }

    fn approx_eq(&self, other: &Self, _tol: &Tolerance) -> bool {
        self == other
    }

    fn approx_zero(&self, _scale: &Self, _tol: &Tolerance) -> bool {
        self.is_zero()
    }

    fn is_finite_value(&self) -> bool {
        true
    }
}

impl Field for f64 {
    const REGIME: Regime = Regime::Float;

    fn as_f64(&self) -> f64 {
        *self
    }

    fn from_rational(q: &Rational) -> Self {
        q.as_f64()
    }

    fn approx_eq(&self, other: &Self, tol: &Tolerance) -> bool {
        tol.eq(*self, *other)
    }

    fn approx_zero(&self, scale: &Self, tol: &Tolerance) -> bool {
        tol.is_zero(*self, *scale)
    }

    fn is_finite_value(&self) -> bool {
        self.is_finite()
    }
}

/// Parse `"p/q"`, an integer, or a finite decimal such as `"-1.25"` into an
/// exact rational.
pub fn parse_rational(input: &str) -> Result<Rational> {
    let err = || Error::Parse { input: input.to_string() };
    let s = input.trim();
    if s.is_empty() {
        return Err(err());
    }
    if let Some((num, den)) = s.split_once('/') {
        let num = BigInt::from_str(num.trim()).map_err(|_| err())?;
        let den = BigInt::from_str(den.trim()).map_err(|_| err())?;
        if den.is_zero() {
            return Err(err());
        }
        return Ok(Rational::new(num, den));
    }
    if let Ok(int) = BigInt::from_str(s) {
        return Ok(Rational::from_integer(int));
    }
    parse_decimal(s).ok_or_else(err)
}

fn parse_decimal(s: &str) -> Option<Rational> {
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(pos) => (&s[..pos], s[pos + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let all: String = format!("{int_part}{frac_part}");
    let mut value = Rational::from_integer(BigInt::from_str(&all).ok()?);
    let shift = exponent - frac_part.len() as i32;
    let ten = Rational::from_integer(BigInt::from(10));
    if shift >= 0 {
        value *= num_traits::pow(ten, shift as usize);
    } else {
        value /= num_traits::pow(ten, (-shift) as usize);
    }
    Some(if negative { -value } else { value })
}

/// A value tagged with its regime. Arithmetic on mixed regimes is refused.
#[derive(Debug, Clone, PartialEq)]
pub enum Scalar {
    Exact(Rational),
    Float(f64),
}

impl Scalar {
    pub fn regime(&self) -> Regime {
        match self {
            Scalar::Exact(_) => Regime::Exact,
            Scalar::Float(_) => Regime::Float,
        }
    }

    /// One-way promotion to floating point.
    pub fn promote(&self) -> f64 {
        match self {
            Scalar::Exact(q) => q.as_f64(),
            Scalar::Float(x) => *x,
        }
    }

    pub fn as_exact(&self) -> Result<&Rational> {
        match self {
            Scalar::Exact(q) => Ok(q),
            Scalar::Float(x) => Err(Error::MixedRegime(format!("expected an exact rational, found float {x}"))),
        }
    }

    pub fn as_float(&self) -> Result<f64> {
        match self {
            Scalar::Float(x) => Ok(*x),
            Scalar::Exact(q) => {
                Err(Error::MixedRegime(format!("expected a float, found exact {q}; promote explicitly")))
            }
        }
    }

    /// Parse a string in the requested regime. In the exact regime only
    /// rational syntax is accepted.
    pub fn parse(input: &str, regime: Regime) -> Result<Scalar> {
        match regime {
            Regime::Exact => parse_rational(input).map(Scalar::Exact),
            Regime::Float => {
                let x = match parse_rational(input) {
                    Ok(q) => q.as_f64(),
                    Err(_) => input.trim().parse::<f64>().map_err(|_| Error::Parse { input: input.to_string() })?,
                };
                if !x.is_finite() {
                    return Err(Error::Parse { input: input.to_string() });
                }
                Ok(Scalar::Float(x))
            }
        }
    }
}

impl From<Rational> for Scalar {
    fn from(q: Rational) -> Self {
        Scalar::Exact(q)
    }
}

impl From<f64> for Scalar {
    fn from(x: f64) -> Self {
        Scalar::Float(x)
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(q) => write!(f, "{q}"),
            Scalar::Float(x) => write!(f, "{x}"),
        }
    }
}

/// Shorthand for small rational literals.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Binomial coefficient as a field element.
pub fn binomial<T: Field>(n: usize, k: usize) -> T {
    if k > n {
        return T::zero();
    }
    let k = k.min(n - k);
    let mut acc = T::one();
    for i in 0..k {
        acc = acc * T::from_int((n - i) as i64) / T::from_int((i + 1) as i64);
    }
    acc
}

/// Exact square root of a non-negative rational, when it exists.
pub fn rational_sqrt(q: &Rational) -> Option<Rational> {
    if q.is_negative() {
        return None;
    }
    let num = q.numer().sqrt();
    let den = q.denom().sqrt();
    if &(&num * &num) == q.numer() && &(&den * &den) == q.denom() {
        Some(Rational::new(num, den))
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_rational_forms() {
        assert_eq!(parse_rational("8/9").unwrap(), rat(8, 9));
        assert_eq!(parse_rational("-6/4").unwrap(), rat(-3, 2));
        assert_eq!(parse_rational("3").unwrap(), rat(3, 1));
        assert_eq!(parse_rational("0.95").unwrap(), rat(19, 20));
        assert_eq!(parse_rational("-1.25e1").unwrap(), rat(-25, 2));
        assert_eq!(parse_rational("2e-3").unwrap(), rat(1, 500));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("").is_err());
        assert!(parse_rational("nan").is_err());
    }

    #[test]
    fn exact_regime_rejects_non_rational() {
        assert!(Scalar::parse("inf", Regime::Exact).is_err());
        assert!(Scalar::parse("inf", Regime::Float).is_err());
        assert_eq!(Scalar::parse("1/4", Regime::Float).unwrap(), Scalar::Float(0.25));
    }

    #[test]
    fn mixed_regime_access_is_refused() {
        let s = Scalar::Float(0.5);
        assert!(matches!(s.as_exact(), Err(Error::MixedRegime(_))));
        assert_eq!(Scalar::Exact(rat(1, 2)).promote(), 0.5);
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial::<Rational>(5, 2), rat(10, 1));
        assert_eq!(binomial::<Rational>(12, 6), rat(924, 1));
        assert_eq!(binomial::<Rational>(3, 4), rat(0, 1));
        assert_eq!(binomial::<f64>(4, 0), 1.0);
    }

    #[test]
    fn exact_square_roots() {
        assert_eq!(rational_sqrt(&rat(4, 9)), Some(rat(2, 3)));
        assert_eq!(rational_sqrt(&rat(4, 3)), None);
        assert_eq!(rational_sqrt(&rat(-1, 1)), None);
    }

    #[test]
    fn float_tolerance() {
        let tol = Tolerance::default();
        assert!(1.0f64.approx_eq(&(1.0 + 1e-10), &tol));
        assert!(!1.0f64.approx_eq(&1.001, &tol));
        assert!(1e-13f64.approx_zero(&0.0, &tol));
    }
}
