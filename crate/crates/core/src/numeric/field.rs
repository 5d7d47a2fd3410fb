use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::Matrix;

/// Scalar field used by [`Matrix`]. Implemented for `f64` and exact
/// arbitrary-precision rationals.
pub trait Field:
    Clone
    + PartialEq
    + fmt::Debug
    + fmt::Display
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// True when arithmetic never rounds.
    const EXACT: bool;

    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn from_i64(v: i64) -> Self;
    fn to_f64(&self) -> f64;

    /// Absolute value as a float, used for pivot selection.
    fn magnitude(&self) -> f64;

    /// Strictly positive. Used by the exact positive-definiteness test.
    fn is_positive(&self) -> bool;

    /// Parse one entry of the shared matrix text format.
    fn parse_entry(s: &str) -> Option<Self>;

    /// Determinant of a square matrix; the strategy is field specific.
    fn determinant(m: &Matrix<Self>) -> Self;

    /// Solves `a x = b` for square `a`.
    fn solve_system(a: &Matrix<Self>, b: &Matrix<Self>) -> crate::Result<Matrix<Self>> {
        super::linalg::gauss_jordan_solve(a, b)
    }
}

impl Field for f64 {
    const EXACT: bool = false;

    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn from_i64(v: i64) -> Self {
        v as f64
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
    fn is_positive(&self) -> bool {
        *self > 0.0
    }
    fn parse_entry(s: &str) -> Option<Self> {
        if let Some((p, q)) = s.split_once('/') {
            let p: f64 = p.trim().parse().ok()?;
            let q: f64 = q.trim().parse().ok()?;
            return Some(p / q);
        }
        s.parse().ok()
    }
    fn determinant(m: &Matrix<Self>) -> Self {
        super::linalg::lu_determinant(m)
    }
}

impl Field for BigRational {
    const EXACT: bool = true;

    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }
    fn to_f64(&self) -> f64 {
        rational_to_f64(self)
    }
    fn magnitude(&self) -> f64 {
        rational_to_f64(self).abs()
    }
    fn is_positive(&self) -> bool {
        Signed::is_positive(self)
    }
    fn parse_entry(s: &str) -> Option<Self> {
        parse_rational(s)
    }
    fn determinant(m: &Matrix<Self>) -> Self {
        super::linalg::bareiss_determinant(m)
    }

    fn solve_system(a: &Matrix<Self>, b: &Matrix<Self>) -> crate::Result<Matrix<Self>> {
        super::linalg::bareiss_solve(a, b)
    }
}

/// Parses "p/q", integers and decimal literals (with optional exponent) exactly.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().ok()?;
        let q: BigInt = q.trim().parse().ok()?;
        if q.is_zero() {
            return None;
        }
        return Some(BigRational::new(p, q));
    }
    if let Ok(i) = s.parse::<BigInt>() {
        return Some(BigRational::from_integer(i));
    }
    // decimal literal, e.g. -1.25e-3
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
    if !int_part
        .chars()
        .chain(frac_part.chars())
        .all(|c| c.is_ascii_digit())
    {
        return None;
    }
    let all_digits = format!("{int_part}{frac_part}");
    let mut numer: BigInt = all_digits.parse().ok()?;
    if negative {
        numer = -numer;
    }
    let scale = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let value = if scale >= 0 {
        BigRational::from_integer(numer * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(numer, num_traits::pow(ten, (-scale) as usize))
    };
    Some(value)
}

/// Converts a rational to the nearest representable float, robust to huge
/// numerators and denominators.
pub fn rational_to_f64(r: &BigRational) -> f64 {
    if let (Some(n), Some(d)) = (r.numer().to_f64(), r.denom().to_f64()) {
        if n.is_finite() && d.is_finite() && d != 0.0 {
            return n / d;
        }
    }
    // Shift both operands down to about 60 significant bits.
    let nb = r.numer().bits() as i64;
    let db = r.denom().bits() as i64;
    let shift_n = (nb - 60).max(0);
    let shift_d = (db - 60).max(0);
    let n = (r.numer() >> shift_n as usize).to_f64().unwrap_or(0.0);
    let d = (r.denom() >> shift_d as usize).to_f64().unwrap_or(1.0);
    (n / d) * 2f64.powi((shift_n - shift_d) as i32)
}

/// Exact rational from a finite float.
pub fn rational_from_f64(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite float")
}

/// Least common multiple of the denominators of a slice of rationals.
pub(crate) fn denominator_lcm<'a>(values: impl IntoIterator<Item = &'a BigRational>) -> BigInt {
    values
        .into_iter()
        .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn parses_rational_forms() {
        assert_eq!(parse_rational("3/4"), Some(q(3, 4)));
        assert_eq!(parse_rational("-6/8"), Some(q(-3, 4)));
        assert_eq!(parse_rational("17"), Some(q(17, 1)));
        assert_eq!(parse_rational("22.375"), Some(q(179, 8)));
        assert_eq!(parse_rational("-1.5e2"), Some(q(-150, 1)));
        assert_eq!(parse_rational("2.5e-1"), Some(q(1, 4)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("abc"), None);
        assert_eq!(parse_rational("."), None);
    }

    #[test]
    fn huge_rationals_convert_to_float() {
        let big = num_traits::pow(BigInt::from(10), 400);
        let r = BigRational::new(big.clone() * 3, big);
        assert!((rational_to_f64(&r) - 3.0).abs() < 1e-12);
    }
}
