//! Scalar abstraction over the two numeric modes: `f64` for production runs
//! and arbitrary-precision rationals for ground-truth oracles.

use num::bigint::BigInt;
use num::rational::Ratio;
use num::{One, Signed, ToPrimitive, Zero};
use std::ops::{Add, Div, Mul, Sub};

/// Exact rational scalar used by the oracle mode.
pub type Rational = Ratio<BigInt>;

/// Small exact rational for parameters parsed from decimal text.
pub type Rational64 = Ratio<i64>;

pub trait Scalar:
    Clone
    + PartialEq
    + PartialOrd
    + std::fmt::Debug
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Zero
    + One
{
    fn from_ratio(num: i64, den: i64) -> Self;
    fn from_ratio64(r: Rational64) -> Self {
        Self::from_ratio(*r.numer(), *r.denom())
    }
    fn to_f64(&self) -> f64;
    fn abs_val(&self) -> Self;
    /// Rendering for coordinate-list matrix dumps: `num/den` or a decimal.
    fn coo_repr(&self) -> String;
}

impl Scalar for f64 {
    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn abs_val(&self) -> Self {
        self.abs()
    }
    fn coo_repr(&self) -> String {
        format!("{self}")
    }
}

impl Scalar for Rational {
    fn from_ratio(num: i64, den: i64) -> Self {
        Ratio::new(BigInt::from(num), BigInt::from(den))
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn abs_val(&self) -> Self {
        Signed::abs(self)
    }
    fn coo_repr(&self) -> String {
        format!("{}/{}", self.numer(), self.denom())
    }
}

/// Round to nearest, ties to even, clamped to `u64`.
pub fn round_half_even(x: f64) -> u64 {
    if !x.is_finite() || x <= 0.0 {
        return 0;
    }
    let r = x.round_ties_even();
    if r >= u64::MAX as f64 {
        u64::MAX
    } else {
        r as u64
    }
}

/// Parse a plain decimal (`2`, `0.5`, `-1.25`) or fraction (`1/3`) into an
/// exact rational.
pub fn parse_rational(s: &str) -> Option<Rational64> {
    let s = s.trim();
    if let Some((num, den)) = s.split_once('/') {
        let n: i64 = num.trim().parse().ok()?;
        let d: i64 = den.trim().parse().ok()?;
        if d == 0 {
            return None;
        }
        return Some(Ratio::new(n, d));
    }
    let (sign, body) = match s.strip_prefix('-') {
        Some(rest) => (-1i64, rest),
        None => (1i64, s),
    };
    if body.is_empty() {
        return None;
    }
    let (int_part, frac_part) = match body.split_once('.') {
        Some((i, f)) => (i, f),
        None => (body, ""),
    };
    if frac_part.len() > 15 || !int_part.chars().all(|c| c.is_ascii_digit()) {
        return None;
    }
    if !frac_part.chars().all(|c| c.is_ascii_digit()) {
        return None;
    }
    let int_val: i64 = if int_part.is_empty() { 0 } else { int_part.parse().ok()? };
    let scale = 10i64.checked_pow(frac_part.len() as u32)?;
    let frac_val: i64 = if frac_part.is_empty() { 0 } else { frac_part.parse().ok()? };
    let num = int_val.checked_mul(scale)?.checked_add(frac_val)?;
    Some(Ratio::new(sign * num, scale))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_ties_to_even() {
        assert_eq!(round_half_even(2.5), 2);
        assert_eq!(round_half_even(3.5), 4);
        assert_eq!(round_half_even(2.885), 3);
        assert_eq!(round_half_even(0.4), 0);
        assert_eq!(round_half_even(-1.0), 0);
    }

    #[test]
    fn parse_decimals_exactly() {
        assert_eq!(parse_rational("0.5"), Some(Ratio::new(1, 2)));
        assert_eq!(parse_rational("2"), Some(Ratio::new(2, 1)));
        assert_eq!(parse_rational("1.25"), Some(Ratio::new(5, 4)));
        assert_eq!(parse_rational("1/3"), Some(Ratio::new(1, 3)));
        assert_eq!(parse_rational("-1.5"), Some(Ratio::new(-3, 2)));
        assert_eq!(parse_rational("x"), None);
        assert_eq!(parse_rational("1/0"), None);
    }

    #[test]
    fn rational_scalar_roundtrip() {
        let r = Rational::from_ratio(1, 3);
        assert_eq!(r.coo_repr(), "1/3");
        assert!((Scalar::to_f64(&r) - 1.0 / 3.0).abs() < 1e-15);
    }
}
