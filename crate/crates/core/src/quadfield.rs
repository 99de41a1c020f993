//! Exact arithmetic in real quadratic fields `Q(sqrt d)`.
//!
//! Elements are stored as `a + b*sqrt(d)` with canonical rational
//! coefficients, so structural equality is numeric equality. Ordering,
//! floors and decimal expansions are decided with integer square roots on
//! cleared denominators; no floating point is involved anywhere.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_integer::{Integer, Roots};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

pub type Rational = BigRational;

/// Largest trial divisor used when checking a radicand for square factors.
pub const SQUAREFREE_TRIAL_LIMIT: u64 = 1_000_000;

/// Maximum number of fractional digits `to_decimal` will produce.
pub const MAX_DECIMAL_DIGITS: usize = 10_000;

/// Number of fractional digits attached to serialized values.
pub const REPORT_DIGITS: usize = 30;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QuadError {
    #[error("radicand {0} must be at least 2")]
    RadicandTooSmall(String),
    #[error("radicand {0} is divisible by the square of {1}")]
    NotSquarefree(u64, u64),
    #[error("radicand {0} exceeds the verifiable bound {limit}", limit = SQUAREFREE_TRIAL_LIMIT as u128 * SQUAREFREE_TRIAL_LIMIT as u128)]
    RadicandTooLarge(String),
    #[error("radicand mismatch: sqrt({0}) vs sqrt({1})")]
    RadicandMismatch(u64, u64),
    #[error("division by zero")]
    DivisionByZero,
    #[error("decimal digits must be in 1..={MAX_DECIMAL_DIGITS}, got {0}")]
    DigitsOutOfRange(usize),
    #[error("invalid rational literal {0:?}")]
    InvalidRational(String),
}

/// Parses a decimal-free rational literal: `"p"` or `"p/q"` with `q != 0`.
pub fn parse_rational(s: &str) -> Result<Rational, QuadError> {
    let bad = || QuadError::InvalidRational(s.to_string());
    let s_trim = s.trim();
    let parse_int = |t: &str| -> Result<BigInt, QuadError> {
        let digits = t.strip_prefix(['-', '+']).unwrap_or(t);
        if digits.is_empty() || !digits.bytes().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        BigInt::from_str(t).map_err(|_| bad())
    };
    match s_trim.split_once('/') {
        None => Ok(Rational::from_integer(parse_int(s_trim)?)),
        Some((num, den)) => {
            let num = parse_int(num)?;
            let den = parse_int(den)?;
            if den.is_zero() {
                return Err(bad());
            }
            Ok(Rational::new(num, den))
        }
    }
}

/// Renders a rational as `"p/q"`, or `"p"` when the denominator is one.
pub fn format_rational(r: &Rational) -> String {
    r.to_string()
}

/// A squarefree integer `d >= 2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Radicand(u64);

impl Radicand {
    pub fn new(d: u64) -> Result<Self, QuadError> {
        if d < 2 {
            return Err(QuadError::RadicandTooSmall(d.to_string()));
        }
        if d as u128 > SQUAREFREE_TRIAL_LIMIT as u128 * SQUAREFREE_TRIAL_LIMIT as u128 {
            return Err(QuadError::RadicandTooLarge(d.to_string()));
        }
        let mut p = 2u64;
        while p * p <= d {
            if d.is_multiple_of(p * p) {
                return Err(QuadError::NotSquarefree(d, p));
            }
            p += 1;
        }
        Ok(Radicand(d))
    }

    pub fn value(self) -> u64 {
        self.0
    }

    fn big(self) -> BigInt {
        BigInt::from(self.0)
    }
}

impl fmt::Display for Radicand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// An element `a + b*sqrt(d)` of a real quadratic field.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QuadExt {
    a: Rational,
    b: Rational,
    d: Radicand,
}

impl QuadExt {
    pub fn new(a: Rational, b: Rational, d: Radicand) -> Self {
        QuadExt { a, b, d }
    }

    /// Convenience constructor from `(p1/q1) + (p2/q2) sqrt(d)` with small integers.
    pub fn from_parts(p1: i64, q1: i64, p2: i64, q2: i64, d: Radicand) -> Self {
        QuadExt::new(
            Rational::new(p1.into(), q1.into()),
            Rational::new(p2.into(), q2.into()),
            d,
        )
    }

    pub fn from_rational(r: Rational, d: Radicand) -> Self {
        QuadExt::new(r, Rational::zero(), d)
    }

    pub fn from_integer(n: i64, d: Radicand) -> Self {
        QuadExt::from_rational(Rational::from_integer(n.into()), d)
    }

    pub fn zero(d: Radicand) -> Self {
        QuadExt::from_integer(0, d)
    }

    pub fn one(d: Radicand) -> Self {
        QuadExt::from_integer(1, d)
    }

    /// `sqrt(d)` itself.
    pub fn sqrt_d(d: Radicand) -> Self {
        QuadExt::new(Rational::zero(), Rational::one(), d)
    }

    pub fn a(&self) -> &Rational {
        &self.a
    }

    pub fn b(&self) -> &Rational {
        &self.b
    }

    pub fn radicand(&self) -> Radicand {
        self.d
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    /// The rational value, if `b = 0`.
    pub fn as_rational(&self) -> Option<&Rational> {
        self.is_rational().then_some(&self.a)
    }

    /// Re-expresses a rational element over another radicand.
    pub fn with_radicand(&self, d: Radicand) -> Result<Self, QuadError> {
        if self.d == d || self.is_rational() {
            Ok(QuadExt::new(self.a.clone(), self.b.clone(), d))
        } else {
            Err(QuadError::RadicandMismatch(self.d.0, d.0))
        }
    }

    fn check(&self, other: &Self) -> Result<(), QuadError> {
        if self.d == other.d {
            Ok(())
        } else {
            Err(QuadError::RadicandMismatch(self.d.0, other.d.0))
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, QuadError> {
        self.check(other)?;
        Ok(QuadExt::new(&self.a + &other.a, &self.b + &other.b, self.d))
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, QuadError> {
        self.check(other)?;
        Ok(QuadExt::new(&self.a - &other.a, &self.b - &other.b, self.d))
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self, QuadError> {
        self.check(other)?;
        let d = Rational::from_integer(self.d.big());
        let a = &self.a * &other.a + &self.b * &other.b * d;
        let b = &self.a * &other.b + &other.a * &self.b;
        Ok(QuadExt::new(a, b, self.d))
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self, QuadError> {
        self.check(other)?;
        self.checked_mul(&other.inv()?)
    }

    pub fn conj(&self) -> Self {
        QuadExt::new(self.a.clone(), -&self.b, self.d)
    }

    /// Field norm `a^2 - d b^2`.
    pub fn norm(&self) -> Rational {
        &self.a * &self.a - &self.b * &self.b * Rational::from_integer(self.d.big())
    }

    pub fn trace(&self) -> Rational {
        &self.a + &self.a
    }

    /// Primitive integer coefficients `[c0, c1, ...]` of the minimal
    /// polynomial over `Q`, leading coefficient positive.
    pub fn minimal_polynomial(&self) -> Vec<BigInt> {
        let monic = if self.is_rational() {
            vec![-self.a.clone(), Rational::one()]
        } else {
            vec![self.norm(), -self.trace(), Rational::one()]
        };
        let lcm = monic.iter().fold(BigInt::one(), |l, c| l.lcm(c.denom()));
        let ints: Vec<BigInt> = monic.iter().map(|c| (c * Rational::from_integer(lcm.clone())).to_integer()).collect();
        let g = ints.iter().fold(BigInt::zero(), |g, c| g.gcd(c));
        ints.into_iter().map(|c| c / &g).collect()
    }

    pub fn inv(&self) -> Result<Self, QuadError> {
        if self.is_zero() {
            return Err(QuadError::DivisionByZero);
        }
        let n = self.norm();
        Ok(QuadExt::new(&self.a / &n, -&self.b / &n, self.d))
    }

    pub fn scale(&self, r: &Rational) -> Self {
        QuadExt::new(&self.a * r, &self.b * r, self.d)
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = QuadExt::one(self.d);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// Exact sign of the real number `a + b*sqrt(d)`.
    pub fn sign(&self) -> i8 {
        let sa = rsign(&self.a);
        let sb = rsign(&self.b);
        if sb == 0 {
            return sa;
        }
        if sa == 0 || sa == sb {
            return sb;
        }
        // Opposite signs: the larger of |a| and |b| sqrt(d) wins.
        let a2 = &self.a * &self.a;
        let b2d = &self.b * &self.b * Rational::from_integer(self.d.big());
        if a2 > b2d {
            sa
        } else {
            sb
        }
    }

    /// `floor(n * self)`.
    pub fn floor_scaled(&self, n: u64) -> BigInt {
        FloorKernel::new(self).floor(n)
    }

    /// `ceil(n * self)`.
    pub fn ceil_scaled(&self, n: u64) -> BigInt {
        -(-self).floor_scaled(n)
    }

    /// `floor(n * self)` for an arbitrary integer multiplier.
    pub fn floor_scaled_big(&self, n: &BigInt) -> BigInt {
        FloorKernel::new(self).floor_big(n)
    }

    pub fn floor(&self) -> BigInt {
        self.floor_scaled(1)
    }

    pub fn ceil(&self) -> BigInt {
        self.ceil_scaled(1)
    }

    /// Fractional part `self - floor(self)`.
    pub fn fract(&self) -> Self {
        self - &QuadExt::from_rational(Rational::from_integer(self.floor()), self.d)
    }

    /// Decimal expansion with `digits` fractional digits, rounded half to even.
    pub fn to_decimal(&self, digits: usize) -> Result<String, QuadError> {
        if digits == 0 || digits > MAX_DECIMAL_DIGITS {
            return Err(QuadError::DigitsOutOfRange(digits));
        }
        let negative = self.sign() < 0;
        let mag = if negative { -self } else { self.clone() };
        let scale = num_traits::pow(BigInt::from(10u32), digits);
        let twice: BigInt = &scale * 2u32;
        let y = mag.floor_scaled_big(&twice);
        let (mut v, odd) = y.div_rem(&BigInt::from(2u32));
        if odd.is_one() {
            let exact_half = mag.is_rational() && (&mag.a * Rational::from_integer(twice)).is_integer();
            if !exact_half || v.is_odd() {
                v += 1u32;
            }
        }
        let (int_part, frac_part) = v.div_rem(&scale);
        let sign = if negative && !v.is_zero() { "-" } else { "" };
        Ok(format!(
            "{sign}{int_part}.{frac:0>width$}",
            frac = frac_part.to_string(),
            width = digits
        ))
    }

    /// Rough `f64` value, for diagnostics only.
    pub fn to_f64(&self) -> f64 {
        let a = self.a.to_f64().unwrap_or(f64::NAN);
        let b = self.b.to_f64().unwrap_or(f64::NAN);
        a + b * (self.d.0 as f64).sqrt()
    }
}

fn rsign(r: &Rational) -> i8 {
    match r.numer().sign() {
        Sign::Minus => -1,
        Sign::NoSign => 0,
        Sign::Plus => 1,
    }
}

/// Precomputed data for repeated `floor(n * x)` queries.
///
/// With `x = (A + B sqrt d) / D` over a common denominator `D > 0`,
/// `floor(n x) = floor((nA + floor(nB sqrt d)) / D)`, and the inner floor
/// is an integer square root of `n^2 B^2 d` adjusted for the sign of `nB`.
#[derive(Debug, Clone)]
pub struct FloorKernel {
    num_a: BigInt,
    num_b: BigInt,
    den: BigInt,
    d: u64,
    small: Option<(i128, i128, i128)>,
}

impl FloorKernel {
    pub fn new(x: &QuadExt) -> Self {
        let den = x.a.denom().lcm(x.b.denom());
        let num_a = x.a.numer() * (&den / x.a.denom());
        let num_b = x.b.numer() * (&den / x.b.denom());
        let small = match (num_a.to_i64(), num_b.to_i64(), den.to_i64()) {
            (Some(a), Some(b), Some(c)) => Some((a as i128, b as i128, c as i128)),
            _ => None,
        };
        FloorKernel { num_a, num_b, den, d: x.d.0, small }
    }

    pub fn floor(&self, n: u64) -> BigInt {
        if let Some(v) = self.floor_small(n) {
            return BigInt::from(v);
        }
        self.floor_big(&BigInt::from(n))
    }

    /// Machine-integer path; `None` when an intermediate would overflow.
    pub fn floor_small(&self, n: u64) -> Option<i128> {
        let (a, b, den) = self.small?;
        let n = n as i128;
        let t = n.checked_mul(b)?;
        let m = t.unsigned_abs().checked_mul(t.unsigned_abs())?.checked_mul(self.d as u128)?;
        let r = m.sqrt();
        let r = i128::try_from(r).ok()?;
        let s = if t >= 0 {
            r
        } else if (r as u128) * (r as u128) == m {
            -r
        } else {
            -r - 1
        };
        let num = n.checked_mul(a)?.checked_add(s)?;
        Some(num.div_euclid(den))
    }

    pub fn floor_big(&self, n: &BigInt) -> BigInt {
        let t = n * &self.num_b;
        let m = (&t * &t) * BigInt::from(self.d);
        let r = m.sqrt();
        let s = if !t.is_negative() {
            r
        } else if &r * &r == m {
            -r
        } else {
            -r - 1
        };
        (n * &self.num_a + s).div_floor(&self.den)
    }
}

impl PartialOrd for QuadExt {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        let diff = self.checked_sub(other).ok()?;
        Some(diff.sign().cmp(&0))
    }
}

impl fmt::Display for QuadExt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            return write!(f, "{}", self.a);
        }
        let b_abs = self.b.abs();
        let coeff = if b_abs.is_one() { String::new() } else { format!("{b_abs}*") };
        if self.a.is_zero() {
            let sign = if self.b.is_negative() { "-" } else { "" };
            write!(f, "{sign}{coeff}sqrt({})", self.d)
        } else {
            let op = if self.b.is_negative() { '-' } else { '+' };
            write!(f, "{} {op} {coeff}sqrt({})", self.a, self.d)
        }
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl $trait<&QuadExt> for &QuadExt {
            type Output = QuadExt;
            /// Panics on radicand mismatch; use the `checked_*` form to recover.
            fn $method(self, rhs: &QuadExt) -> QuadExt {
                self.$checked(rhs).expect("quadratic field operation")
            }
        }
        impl $trait<QuadExt> for QuadExt {
            type Output = QuadExt;
            fn $method(self, rhs: QuadExt) -> QuadExt {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&QuadExt> for QuadExt {
            type Output = QuadExt;
            fn $method(self, rhs: &QuadExt) -> QuadExt {
                (&self).$method(rhs)
            }
        }
        impl $trait<QuadExt> for &QuadExt {
            type Output = QuadExt;
            fn $method(self, rhs: QuadExt) -> QuadExt {
                self.$method(&rhs)
            }
        }
    };
}

forward_binop!(Add, add, checked_add);
forward_binop!(Sub, sub, checked_sub);
forward_binop!(Mul, mul, checked_mul);
forward_binop!(Div, div, checked_div);

impl Neg for &QuadExt {
    type Output = QuadExt;
    fn neg(self) -> QuadExt {
        QuadExt::new(-&self.a, -&self.b, self.d)
    }
}

impl Neg for QuadExt {
    type Output = QuadExt;
    fn neg(self) -> QuadExt {
        -&self
    }
}

#[derive(Serialize, Deserialize)]
struct QuadExtRepr {
    a: String,
    b: String,
    d: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    decimal: Option<String>,
}

impl Serialize for QuadExt {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        QuadExtRepr {
            a: format_rational(&self.a),
            b: format_rational(&self.b),
            d: self.d.0,
            decimal: self.to_decimal(REPORT_DIGITS).ok(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for QuadExt {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let repr = QuadExtRepr::deserialize(deserializer)?;
        let a = parse_rational(&repr.a).map_err(D::Error::custom)?;
        let b = parse_rational(&repr.b).map_err(D::Error::custom)?;
        let d = Radicand::new(repr.d).map_err(D::Error::custom)?;
        Ok(QuadExt::new(a, b, d))
    }
}

/// Parses a `{"a": "p/q", "b": "r/s", "d": n}` document.
pub fn quad_from_json(text: &str) -> Result<QuadExt, serde_json::Error> {
    serde_json::from_str(text)
}

/// `alpha = 3 / (9 - sqrt 3) = 9/26 + (1/26) sqrt 3`.
pub fn example_alpha() -> QuadExt {
    let d = Radicand::new(3).expect("3 is squarefree");
    let three = QuadExt::from_integer(3, d);
    let denom = QuadExt::from_integer(9, d) - QuadExt::sqrt_d(d);
    three / denom
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r3() -> Radicand {
        Radicand::new(3).unwrap()
    }

    fn q(p1: i64, q1: i64, p2: i64, q2: i64) -> QuadExt {
        QuadExt::from_parts(p1, q1, p2, q2, r3())
    }

    #[test]
    fn minimal_polynomials() {
        let ints = |v: &[i64]| v.iter().map(|&c| BigInt::from(c)).collect::<Vec<_>>();
        assert_eq!(example_alpha().minimal_polynomial(), ints(&[3, -18, 26]));
        assert_eq!(QuadExt::sqrt_d(r3()).minimal_polynomial(), ints(&[-3, 0, 1]));
        assert_eq!(q(-2, 3, 0, 1).minimal_polynomial(), ints(&[2, 3]));
        assert_eq!(example_alpha().trace(), Rational::new(9.into(), 13.into()));
    }

    #[test]
    fn radicand_validation() {
        assert!(Radicand::new(2).is_ok());
        assert!(Radicand::new(30).is_ok());
        assert_eq!(Radicand::new(12), Err(QuadError::NotSquarefree(12, 2)));
        assert_eq!(Radicand::new(50), Err(QuadError::NotSquarefree(50, 5)));
        assert!(matches!(Radicand::new(1), Err(QuadError::RadicandTooSmall(_))));
        assert!(matches!(Radicand::new(0), Err(QuadError::RadicandTooSmall(_))));
        assert!(matches!(
            Radicand::new(1_000_000_000_001),
            Err(QuadError::RadicandTooLarge(_))
        ));
    }

    #[test]
    fn alpha_rationalized() {
        assert_eq!(example_alpha(), q(9, 26, 1, 26));
    }

    #[test]
    fn add_examples() {
        let alpha = example_alpha();
        assert_eq!(&alpha + &QuadExt::zero(r3()), alpha);
        assert_eq!(q(1, 1, 1, 1) + q(1, 1, -1, 1), QuadExt::from_integer(2, r3()));
        assert_eq!(&alpha + &alpha, q(9, 13, 1, 13));
    }

    #[test]
    fn mul_examples() {
        let alpha = example_alpha();
        let alpha2 = &alpha * &alpha;
        assert_eq!(alpha2, q(84, 676, 18, 676));
        assert_eq!(&alpha2 * &alpha, q(810, 17576, 246, 17576));
        let s = QuadExt::sqrt_d(r3());
        assert_eq!(&s * &s, QuadExt::from_integer(3, r3()));
    }

    #[test]
    fn mismatch_is_an_error() {
        let x = QuadExt::sqrt_d(Radicand::new(2).unwrap());
        let y = QuadExt::sqrt_d(r3());
        assert_eq!(x.checked_add(&y), Err(QuadError::RadicandMismatch(2, 3)));
        assert_eq!(x.checked_mul(&y), Err(QuadError::RadicandMismatch(2, 3)));
        assert_eq!(x.partial_cmp(&y), None);
    }

    #[test]
    fn sign_examples() {
        assert_eq!(QuadExt::zero(r3()).sign(), 0);
        assert_eq!(q(-5, 1, 3, 1).sign(), 1);
        assert_eq!((example_alpha() - QuadExt::one(r3())).sign(), -1);
        assert_eq!(q(5, 1, -3, 1).sign(), -1);
        assert_eq!(q(-2, 1, 1, 1).sign(), -1);
    }

    #[test]
    fn floor_and_ceil_examples() {
        let alpha = example_alpha();
        assert_eq!(alpha.floor_scaled(0), BigInt::from(0));
        assert_eq!(alpha.ceil_scaled(1), BigInt::from(1));
        assert_eq!(alpha.floor_scaled(1), BigInt::from(0));
        assert_eq!(alpha.ceil_scaled(3), BigInt::from(2));
        let half = QuadExt::from_rational(Rational::new(1.into(), 2.into()), r3());
        assert_eq!(half.floor_scaled(4), BigInt::from(2));
        assert_eq!(half.ceil_scaled(4), BigInt::from(2));
        assert_eq!(half.ceil_scaled(3), BigInt::from(2));
        assert_eq!((-&alpha).floor_scaled(1), BigInt::from(-1));
    }

    #[test]
    fn floor_small_and_big_paths_agree() {
        let x = q(-7, 11, 5, 13);
        let k = FloorKernel::new(&x);
        for n in [0u64, 1, 2, 17, 1000, 123_456_789] {
            assert_eq!(BigInt::from(k.floor_small(n).unwrap()), k.floor_big(&BigInt::from(n)));
        }
        // Overflowing the machine path falls back to big integers.
        assert!(k.floor_small(u64::MAX).is_none());
        assert_eq!(k.floor(u64::MAX), k.floor_big(&BigInt::from(u64::MAX)));
    }

    #[test]
    fn decimal_examples() {
        assert_eq!(example_alpha().to_decimal(6).unwrap(), "0.412771");
        assert_eq!(QuadExt::zero(r3()).to_decimal(3).unwrap(), "0.000");
        // 425.866318160791963...
        assert_eq!(q(72252, 169, -162, 169).to_decimal(4).unwrap(), "425.8663");
        assert_eq!((-example_alpha()).to_decimal(3).unwrap(), "-0.413");
    }

    #[test]
    fn decimal_rounds_half_to_even() {
        let d = r3();
        let r = |p: i64, q: i64| QuadExt::from_rational(Rational::new(p.into(), q.into()), d);
        assert_eq!(r(1, 8).to_decimal(2).unwrap(), "0.12");
        assert_eq!(r(3, 8).to_decimal(2).unwrap(), "0.38");
        assert_eq!(r(-1, 8).to_decimal(2).unwrap(), "-0.12");
        assert_eq!(r(-1, 1000).to_decimal(2).unwrap(), "0.00");
        assert_eq!(r(19999, 2000).to_decimal(3).unwrap(), "10.000");
    }

    #[test]
    fn decimal_digits_bounds() {
        let x = example_alpha();
        assert_eq!(x.to_decimal(0), Err(QuadError::DigitsOutOfRange(0)));
        assert_eq!(x.to_decimal(10_001), Err(QuadError::DigitsOutOfRange(10_001)));
        assert_eq!(x.to_decimal(10_000).unwrap().len(), 10_002);
    }

    #[test]
    fn parse_rational_literals() {
        assert_eq!(parse_rational("468").unwrap(), Rational::from_integer(468.into()));
        assert_eq!(parse_rational("-27/169").unwrap(), Rational::new((-27).into(), 169.into()));
        assert_eq!(parse_rational("2/-4").unwrap(), Rational::new((-1).into(), 2.into()));
        for bad in ["", "1.5", "1/0", "a", "1/", "/2", "--1", "1e3", "1/2/3"] {
            assert!(parse_rational(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn json_round_trip() {
        let x = q(12042, 169, -27, 169);
        let text = serde_json::to_string(&x).unwrap();
        assert!(text.contains("\"a\":\"12042/169\""));
        assert!(text.contains("\"b\":\"-27/169\""));
        assert_eq!(quad_from_json(&text).unwrap(), x);
        assert!(quad_from_json(r#"{"a":"1","b":"1","d":4}"#).is_err());
    }

    #[test]
    fn display() {
        assert_eq!(q(9, 26, 1, 26).to_string(), "9/26 + 1/26*sqrt(3)");
        assert_eq!(q(0, 1, -1, 1).to_string(), "-sqrt(3)");
        assert_eq!(q(2, 1, 0, 1).to_string(), "2");
    }
}
