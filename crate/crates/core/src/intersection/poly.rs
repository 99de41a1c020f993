//! Polynomials in two formal variables `x` and `y` with rational
//! coefficients. In this crate `x` stands for `ceil(alpha n)` and `y` for `n`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::quadfield::{QuadError, QuadExt, Rational};

/// Exponent pair `(deg_x, deg_y)`.
pub type Exponents = (u32, u32);

#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct BivariatePolynomial {
    terms: BTreeMap<Exponents, Rational>,
}

impl BivariatePolynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: Rational) -> Self {
        Self::monomial(c, 0, 0)
    }

    pub fn monomial(c: Rational, dx: u32, dy: u32) -> Self {
        let mut p = Self::zero();
        p.add_term((dx, dy), c);
        p
    }

    pub fn x() -> Self {
        Self::monomial(Rational::one(), 1, 0)
    }

    pub fn y() -> Self {
        Self::monomial(Rational::one(), 0, 1)
    }

    /// Builds from `(coefficient, deg_x, deg_y)` triples with integer
    /// coefficients; repeated exponents are summed.
    pub fn from_int_terms(terms: &[(i64, u32, u32)]) -> Self {
        let mut p = Self::zero();
        for &(c, dx, dy) in terms {
            p.add_term((dx, dy), Rational::from_integer(c.into()));
        }
        p
    }

    fn add_term(&mut self, e: Exponents, c: Rational) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(e).or_insert_with(Rational::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&e);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (Exponents, &Rational)> {
        self.terms.iter().map(|(e, c)| (*e, c))
    }

    pub fn coefficient(&self, dx: u32, dy: u32) -> Rational {
        self.terms.get(&(dx, dy)).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|(a, b)| a + b).max()
    }

    pub fn is_homogeneous(&self, degree: u32) -> bool {
        self.terms.keys().all(|(a, b)| a + b == degree)
    }

    /// Sum of the terms whose total degree equals `degree`.
    pub fn homogeneous_part(&self, degree: u32) -> Self {
        BivariatePolynomial {
            terms: self
                .terms
                .iter()
                .filter(|((a, b), _)| a + b == degree)
                .map(|(e, c)| (*e, c.clone()))
                .collect(),
        }
    }

    pub fn scale(&self, r: &Rational) -> Self {
        let mut out = Self::zero();
        for (e, c) in &self.terms {
            out.add_term(*e, c * r);
        }
        out
    }

    pub fn pow(&self, e: u32) -> Self {
        (0..e).fold(Self::constant(Rational::one()), |acc, _| &acc * self)
    }

    /// `P(x + dx, y + dy)`, fully expanded.
    pub fn shift(&self, dx: &Rational, dy: &Rational) -> Self {
        let sx = Self::x() + Self::constant(dx.clone());
        let sy = Self::y() + Self::constant(dy.clone());
        let mut out = Self::zero();
        for ((ex, ey), c) in &self.terms {
            out = out + (&sx.pow(*ex) * &sy.pow(*ey)).scale(c);
        }
        out
    }

    /// `P(x + sigma, y + 1) - P(x, y)`: the first difference of `P(ceil(alpha n), n)`
    /// when `ceil(alpha (n+1)) = ceil(alpha n) + sigma`.
    pub fn difference(&self, sigma: i64) -> Self {
        let s = Rational::from_integer(sigma.into());
        &self.shift(&s, &Rational::one()) - self
    }

    pub fn evaluate_rational(&self, x: &Rational, y: &Rational) -> Rational {
        self.terms.iter().fold(Rational::zero(), |acc, ((ex, ey), c)| {
            acc + c * num_traits::pow(x.clone(), *ex as usize) * num_traits::pow(y.clone(), *ey as usize)
        })
    }

    pub fn evaluate_integers(&self, x: &BigInt, y: &BigInt) -> Rational {
        self.evaluate_rational(&Rational::from_integer(x.clone()), &Rational::from_integer(y.clone()))
    }

    /// Exact evaluation over a quadratic field. Either argument may be a
    /// rational element carrying a different radicand.
    pub fn evaluate(&self, x: &QuadExt, y: &QuadExt) -> Result<QuadExt, QuadError> {
        let d = if x.is_rational() { y.radicand() } else { x.radicand() };
        let x = x.with_radicand(d)?;
        let y = y.with_radicand(d)?;
        let mut acc = QuadExt::zero(d);
        for ((ex, ey), c) in &self.terms {
            acc = acc + (x.pow(*ex) * y.pow(*ey)).scale(c);
        }
        Ok(acc)
    }

    /// `P(ceil(alpha n), n)`.
    pub fn evaluate_at_n(&self, alpha: &QuadExt, n: u64) -> Rational {
        self.evaluate_integers(&alpha.ceil_scaled(n), &BigInt::from(n))
    }
}

impl Add<&BivariatePolynomial> for &BivariatePolynomial {
    type Output = BivariatePolynomial;
    fn add(self, rhs: &BivariatePolynomial) -> BivariatePolynomial {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(*e, c.clone());
        }
        out
    }
}

impl Add for BivariatePolynomial {
    type Output = BivariatePolynomial;
    fn add(self, rhs: BivariatePolynomial) -> BivariatePolynomial {
        &self + &rhs
    }
}

impl Neg for &BivariatePolynomial {
    type Output = BivariatePolynomial;
    fn neg(self) -> BivariatePolynomial {
        self.scale(&-Rational::one())
    }
}

impl Sub<&BivariatePolynomial> for &BivariatePolynomial {
    type Output = BivariatePolynomial;
    fn sub(self, rhs: &BivariatePolynomial) -> BivariatePolynomial {
        self + &(-rhs)
    }
}

impl Sub for BivariatePolynomial {
    type Output = BivariatePolynomial;
    fn sub(self, rhs: BivariatePolynomial) -> BivariatePolynomial {
        &self - &rhs
    }
}

impl Mul<&BivariatePolynomial> for &BivariatePolynomial {
    type Output = BivariatePolynomial;
    fn mul(self, rhs: &BivariatePolynomial) -> BivariatePolynomial {
        let mut out = BivariatePolynomial::zero();
        for ((ax, ay), ac) in &self.terms {
            for ((bx, by), bc) in &rhs.terms {
                out.add_term((ax + bx, ay + by), ac * bc);
            }
        }
        out
    }
}

impl Mul for BivariatePolynomial {
    type Output = BivariatePolynomial;
    fn mul(self, rhs: BivariatePolynomial) -> BivariatePolynomial {
        &self * &rhs
    }
}

impl fmt::Display for BivariatePolynomial {
    /// Terms by descending total degree, then descending `x` degree.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut keys: Vec<_> = self.terms.keys().copied().collect();
        keys.sort_by_key(|&(a, b)| std::cmp::Reverse((a + b, a)));
        for (i, e) in keys.iter().enumerate() {
            let c = &self.terms[e];
            let mag = c.abs();
            match (i, c.is_negative()) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let is_const = *e == (0, 0);
            if !mag.is_one() || is_const {
                if mag.is_integer() {
                    write!(f, "{mag}")?;
                } else {
                    write!(f, "({mag})")?;
                }
            }
            for (var, deg) in [("x", e.0), ("y", e.1)] {
                match deg {
                    0 => {}
                    1 => write!(f, "{var}")?,
                    k => write!(f, "{var}^{k}")?,
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadfield::example_alpha;

    fn p(terms: &[(i64, u32, u32)]) -> BivariatePolynomial {
        BivariatePolynomial::from_int_terms(terms)
    }

    fn example_cubic() -> BivariatePolynomial {
        p(&[(468, 3, 0), (-486, 2, 1), (162, 1, 2), (54, 0, 3)])
    }

    #[test]
    fn difference_examples() {
        let y3 = p(&[(1, 0, 3)]);
        assert_eq!(y3.difference(0), p(&[(3, 0, 2), (3, 0, 1), (1, 0, 0)]));
        assert!(p(&[(1, 3, 0)]).difference(0).is_zero());
        assert_eq!(
            example_cubic().difference(0).homogeneous_part(2),
            p(&[(-486, 2, 0), (324, 1, 1), (162, 0, 2)])
        );
    }

    /// Hand expansion of the degree-2 part of `p3(x + s, y + 1) - p3(x, y)`:
    /// `1404 s x^2 - 486 x^2 - 972 s xy + 324 xy + 162 s y^2 + 162 y^2`.
    #[test]
    fn difference_degree_two_matches_hand_expansion() {
        for s in -3i64..=3 {
            let expected = p(&[
                (1404 * s - 486, 2, 0),
                (-972 * s + 324, 1, 1),
                (162 * s + 162, 0, 2),
            ]);
            assert_eq!(example_cubic().difference(s).homogeneous_part(2), expected, "sigma = {s}");
        }
        assert_eq!(
            example_cubic().difference(1).homogeneous_part(2),
            p(&[(918, 2, 0), (-648, 1, 1), (324, 0, 2)])
        );
    }

    #[test]
    fn homogeneous_part_examples() {
        assert_eq!(p(&[(3, 0, 2), (3, 0, 1), (1, 0, 0)]).homogeneous_part(2), p(&[(3, 0, 2)]));
        assert_eq!(example_cubic().homogeneous_part(3), example_cubic());
        assert!(example_cubic().homogeneous_part(1).is_zero());
    }

    #[test]
    fn difference_kills_top_degree() {
        for s in 0..=1 {
            assert!(example_cubic().difference(s).homogeneous_part(3).is_zero());
        }
    }

    #[test]
    fn evaluate_examples() {
        let alpha = example_alpha();
        let d = alpha.radicand();
        let one = QuadExt::one(d);
        assert_eq!(
            example_cubic().evaluate(&alpha, &one).unwrap(),
            QuadExt::from_parts(12042, 169, -27, 169, d)
        );
        let q = p(&[(7, 0, 0), (2, 1, 1)]);
        let zero = QuadExt::zero(d);
        assert_eq!(q.evaluate(&zero, &zero).unwrap(), QuadExt::from_integer(7, d));
        let f22 = p(&[(-792, 2, 0), (564, 1, 1), (-175, 0, 2)]);
        let v = f22.evaluate(&alpha, &one).unwrap();
        // -77.138052175313458...
        assert_eq!(v.to_decimal(6).unwrap(), "-77.138052");
        assert_eq!(v, QuadExt::from_integer(-792, d) * alpha.pow(2) + alpha.scale(&Rational::from_integer(564.into())) - QuadExt::from_integer(175, d));
    }

    #[test]
    fn evaluate_coerces_rationals() {
        let alpha = example_alpha();
        let other = QuadExt::from_integer(1, crate::quadfield::Radicand::new(5).unwrap());
        assert!(example_cubic().evaluate(&alpha, &other).is_ok());
        let irr5 = QuadExt::sqrt_d(crate::quadfield::Radicand::new(5).unwrap());
        assert!(example_cubic().evaluate(&alpha, &irr5).is_err());
    }

    #[test]
    fn evaluate_at_n_examples() {
        let alpha = example_alpha();
        assert_eq!(example_cubic().evaluate_at_n(&alpha, 0), Rational::zero());
        assert_eq!(example_cubic().evaluate_at_n(&alpha, 1), Rational::from_integer(198.into()));
        // x = ceil(3 alpha) = 2: 3744 - 5832 + 2916 + 1458
        assert_eq!(example_cubic().evaluate_at_n(&alpha, 3), Rational::from_integer(2286.into()));
    }

    #[test]
    fn display() {
        assert_eq!(example_cubic().to_string(), "468x^3 - 486x^2y + 162xy^2 + 54y^3");
        assert_eq!(p(&[(-1, 0, 0), (1, 1, 0)]).to_string(), "x - 1");
        assert_eq!(BivariatePolynomial::zero().to_string(), "0");
    }
}
