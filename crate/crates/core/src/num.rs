//! Exact rationals and the scalar abstraction shared by the exact and the
//! floating-point solvers.

use std::fmt::Debug;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Rational = BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Exact dyadic conversion. Non-finite input is rejected.
pub fn from_f64(x: f64) -> Option<Rational> {
    Rational::from_float(x)
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // numerator/denominator too large for a direct conversion
        let n = r.numer().to_f64().unwrap_or(f64::NAN);
        let d = r.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

/// Parses `p`, `p/q`, or a decimal literal such as `0.75` or `1e-3`
/// into an exact rational.
pub fn parse_rational(text: &str) -> Option<Rational> {
    let text = text.trim();
    if let Some((n, d)) = text.split_once('/') {
        let n = parse_rational(n)?;
        let d = parse_rational(d)?;
        if d.is_zero() {
            return None;
        }
        return Some(n / d);
    }
    let (mantissa, exponent) = match text.find(['e', 'E']) {
        Some(pos) => (&text[..pos], i32::from_str(&text[pos + 1..]).ok()?),
        None => (text, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (whole, frac) = digits.split_once('.').unwrap_or((digits, ""));
    if whole.is_empty() && frac.is_empty() {
        return None;
    }
    if !whole.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let all: String = format!("{whole}{frac}");
    let numer = BigInt::from_str(if all.is_empty() { "0" } else { &all }).ok()?;
    let scale = exponent - frac.len() as i32;
    let ten = BigInt::from(10);
    let mut value = Rational::from_integer(numer);
    if scale >= 0 {
        value *= Rational::from_integer(num_traits::pow(ten, scale as usize));
    } else {
        value /= Rational::from_integer(num_traits::pow(ten, (-scale) as usize));
    }
    Some(if negative { -value } else { value })
}

/// `num/den`, or just `num` for integers.
pub fn format_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Arithmetic needed by the value computations. Implemented for `f64`
/// (value iteration) and [`Rational`] (exact backwards induction).
pub trait Scalar: Clone + Debug + PartialOrd + Send + Sync + 'static {
    const EXACT: bool;
    fn nil() -> Self;
    fn unit() -> Self;
    fn from_rational(r: &Rational) -> Self;
    /// Exact for rationals, dyadic-exact for floats.
    fn to_rational(&self) -> Rational;
    fn as_f64(&self) -> f64;
    fn plus(&self, other: &Self) -> Self;
    fn minus(&self, other: &Self) -> Self;
    fn times(&self, other: &Self) -> Self;
    fn is_nil(&self) -> bool;

    fn max_of(&self, other: &Self) -> Self {
        if other > self {
            other.clone()
        } else {
            self.clone()
        }
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;
    fn nil() -> Self {
        0.0
    }
    fn unit() -> Self {
        1.0
    }
    fn from_rational(r: &Rational) -> Self {
        to_f64(r)
    }
    fn to_rational(&self) -> Rational {
        from_f64(*self).expect("finite value")
    }
    fn as_f64(&self) -> f64 {
        *self
    }
    fn plus(&self, other: &Self) -> Self {
        self + other
    }
    fn minus(&self, other: &Self) -> Self {
        self - other
    }
    fn times(&self, other: &Self) -> Self {
        self * other
    }
    fn is_nil(&self) -> bool {
        *self == 0.0
    }
}

impl Scalar for Rational {
    const EXACT: bool = true;
    fn nil() -> Self {
        Zero::zero()
    }
    fn unit() -> Self {
        One::one()
    }
    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }
    fn to_rational(&self) -> Rational {
        self.clone()
    }
    fn as_f64(&self) -> f64 {
        to_f64(self)
    }
    fn plus(&self, other: &Self) -> Self {
        self + other
    }
    fn minus(&self, other: &Self) -> Self {
        self - other
    }
    fn times(&self, other: &Self) -> Self {
        self * other
    }
    fn is_nil(&self) -> bool {
        Zero::is_zero(self)
    }
}

/// `|a - b| <= tol * max(1, |a|, |b|)`; exact equality when `tol` is zero.
pub fn approx_eq(a: &Rational, b: &Rational, tol: &Rational) -> bool {
    if tol.is_zero() {
        return a == b;
    }
    let scale = a.abs().max(b.abs()).max(Rational::one());
    (a - b).abs() <= tol * scale
}

/// `a <= b` up to the same relative tolerance as [`approx_eq`].
pub fn approx_le(a: &Rational, b: &Rational, tol: &Rational) -> bool {
    if a <= b {
        return true;
    }
    approx_eq(a, b, tol)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_decimal_and_fraction_literals() {
        assert_eq!(parse_rational("0.75"), Some(rat(3, 4)));
        assert_eq!(parse_rational("3/4"), Some(rat(3, 4)));
        assert_eq!(parse_rational("-2"), Some(int(-2)));
        assert_eq!(parse_rational("1e-3"), Some(rat(1, 1000)));
        assert_eq!(parse_rational(".5"), Some(rat(1, 2)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("abc"), None);
    }

    #[test]
    fn float_conversion_is_exact_for_dyadics() {
        assert_eq!(from_f64(0.25), Some(rat(1, 4)));
        assert_eq!(to_f64(&rat(3, 4)), 0.75);
        assert!(from_f64(f64::NAN).is_none());
    }

    #[test]
    fn tolerance_comparisons() {
        let tol = rat(1, 1_000_000_000);
        let a = from_f64(1.0 / 3.0).unwrap();
        assert!(approx_eq(&a, &rat(1, 3), &tol));
        assert!(!approx_eq(&a, &rat(1, 3), &Rational::zero()));
        assert!(approx_le(&rat(1, 3), &a, &tol));
    }
}
