use std::fmt::Debug;

use num_traits::{Signed, ToPrimitive, Zero};

use crate::num::{self, Rational};

/// Ordered field arithmetic with an optional comparison tolerance: exact for
/// rationals, relative `1e-9` for floats.
pub trait Field: Clone + Debug + PartialOrd + Send + Sync + 'static {
    fn zero() -> Self;
    fn one() -> Self;
    fn from_i64(v: i64) -> Self;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn div(&self, other: &Self) -> Self;
    fn abs(&self) -> Self;
    fn is_exact_zero(&self) -> bool;
    /// Comparison tolerance for a game with these payoffs.
    fn tolerance_for<'a>(values: impl Iterator<Item = &'a Self>) -> Self;
    fn show(&self) -> String;
    fn to_float(&self) -> f64;

    fn max_abs(&self, other: &Self) -> Self {
        let (a, b) = (self.abs(), other.abs());
        if a >= b {
            a
        } else {
            b
        }
    }

    /// `self < other - tol`.
    fn lt_tol(&self, other: &Self, tol: &Self) -> bool {
        *self < other.sub(tol)
    }

    /// `|self| <= tol`.
    fn abs_le(&self, tol: &Self) -> bool {
        self.abs() <= *tol
    }

    fn approx_eq(&self, other: &Self, tol: &Self) -> bool {
        self.sub(other).abs_le(tol)
    }
}

impl Field for Rational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        num_traits::One::one()
    }
    fn from_i64(v: i64) -> Self {
        num::int(v)
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn div(&self, other: &Self) -> Self {
        self / other
    }
    fn abs(&self) -> Self {
        Signed::abs(self)
    }
    fn is_exact_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn tolerance_for<'a>(_values: impl Iterator<Item = &'a Self>) -> Self {
        Zero::zero()
    }
    fn show(&self) -> String {
        num::format_rational(self)
    }
    fn to_float(&self) -> f64 {
        self.to_f64().unwrap_or_else(|| num::to_f64(self))
    }
}

impl Field for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_i64(v: i64) -> Self {
        v as f64
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn div(&self, other: &Self) -> Self {
        self / other
    }
    fn abs(&self) -> Self {
        f64::abs(*self)
    }
    fn is_exact_zero(&self) -> bool {
        *self == 0.0
    }
    fn tolerance_for<'a>(values: impl Iterator<Item = &'a Self>) -> Self {
        1e-9 * values.fold(1.0_f64, |m, v| m.max(f64::abs(*v)))
    }
    fn show(&self) -> String {
        format!("{self}")
    }
    fn to_float(&self) -> f64 {
        *self
    }
}
