//! Group law on short Weierstrass curves over `Q` or `F_p`, divisor classes
//! on the curve, and the point sequence `q_n` with `O_E(n(q - p) + p) ~ q_n`.
//!
//! The class of a divisor `sum m_i P_i` is `(sum m_i, (+)[m_i] P_i)` taken
//! in the group with identity `O`. Two divisors are linearly equivalent
//! exactly when their classes agree.

use std::fmt;

use std::cmp::Ordering;
use std::str::FromStr;

use malachite_base::num::arithmetic::traits::Sign;
use malachite_base::num::conversion::traits::ExactFrom;
use malachite_nz::natural::Natural;
use rayon::prelude::*;
use serde::ser::SerializeMap;
use serde::{Deserialize, Serialize, Serializer};
use thiserror::Error;

use crate::quadfield::{parse_rational, QuadError};

/// No rational point of finite order has order above this.
pub const RATIONAL_TORSION_BOUND: u64 = 12;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PicardError {
    #[error("{0} is not an odd prime")]
    NotOddPrime(u64),
    #[error("singular curve: 4A^3 + 27B^2 = 0")]
    Singular,
    #[error("point {0} is not on the curve")]
    NotOnCurve(String),
    #[error("denominator of {0} vanishes mod p")]
    DenominatorVanishes(String),
    #[error("p and q must differ")]
    EqualBasePoints,
    #[error("sequence length must be positive")]
    EmptySequence,
    #[error("witness bound must be positive")]
    ZeroBound,
    #[error(transparent)]
    Value(#[from] QuadError),
    #[error("invalid curve document: {0}")]
    Json(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BaseField {
    Rational,
    Prime(u64),
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin; these bases suffice for every `u64`.
pub fn is_prime(n: u64) -> bool {
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for p in BASES {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'bases: for a in BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'bases;
            }
        }
        return false;
    }
    true
}

/// Exact coordinates. Rational point arithmetic is dominated by gcds of
/// large integers, so this uses a subquadratic gcd.
pub type Coord = malachite_q::Rational;

/// Parses a strict `p` or `p/q` string into a coordinate.
pub fn parse_coord(s: &str) -> Result<Coord, PicardError> {
    parse_rational(s)?;
    Coord::from_str(s).map_err(|_| PicardError::Json(format!("bad rational {s:?}")))
}

pub fn coord(p: i64, q: i64) -> Coord {
    Coord::from_signeds(p, q)
}

fn residue(n: &Natural, p: u64) -> u64 {
    u64::exact_from(&(n % Natural::from(p)))
}

impl BaseField {
    pub fn prime(p: u64) -> Result<Self, PicardError> {
        if p == 2 || !is_prime(p) {
            return Err(PicardError::NotOddPrime(p));
        }
        Ok(BaseField::Prime(p))
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, BaseField::Prime(_))
    }

    /// Maps a rational into the field; for `F_p` the result is an integer in `[0, p)`.
    pub fn element(&self, r: &Coord) -> Result<Coord, PicardError> {
        match self {
            BaseField::Rational => Ok(r.clone()),
            BaseField::Prime(p) => {
                let (num, den) = r.numerator_and_denominator_ref();
                let den = residue(den, *p);
                if den == 0 {
                    return Err(PicardError::DenominatorVanishes(r.to_string()));
                }
                let mut num = residue(num, *p);
                if r.sign() == Ordering::Less {
                    num = (*p - num) % *p;
                }
                Ok(Coord::from(mul_mod(num, pow_mod(den, *p - 2, *p), *p)))
            }
        }
    }

    /// Value of an element of `F_p`, which is stored as an integer in `[0, p)`.
    fn value(&self, r: &Coord) -> u64 {
        u64::exact_from(r.numerator_ref())
    }

    fn lift(&self, op: fn(u64, u64, u64) -> u64, a: &Coord, b: &Coord, p: u64) -> Coord {
        Coord::from(op(self.value(a), self.value(b), p))
    }

    fn add(&self, a: &Coord, b: &Coord) -> Coord {
        match self {
            BaseField::Rational => a + b,
            BaseField::Prime(p) => self.lift(|x, y, m| ((x as u128 + y as u128) % m as u128) as u64, a, b, *p),
        }
    }

    fn sub(&self, a: &Coord, b: &Coord) -> Coord {
        match self {
            BaseField::Rational => a - b,
            BaseField::Prime(p) => self.lift(|x, y, m| ((x as u128 + m as u128 - y as u128) % m as u128) as u64, a, b, *p),
        }
    }

    fn mul(&self, a: &Coord, b: &Coord) -> Coord {
        match self {
            BaseField::Rational => a * b,
            BaseField::Prime(p) => self.lift(mul_mod, a, b, *p),
        }
    }

    fn neg(&self, a: &Coord) -> Coord {
        self.sub(&self.int(0), a)
    }

    /// `a / b` with `b` nonzero in the field.
    fn div(&self, a: &Coord, b: &Coord) -> Coord {
        match self {
            BaseField::Rational => a / b,
            BaseField::Prime(p) => {
                let inv = pow_mod(self.value(b), *p - 2, *p);
                self.mul(a, &Coord::from(inv))
            }
        }
    }

    fn int(&self, n: i64) -> Coord {
        self.element(&Coord::from(n)).expect("integers have unit denominator")
    }

    fn is_reduced(&self, a: &Coord) -> bool {
        match self {
            BaseField::Rational => true,
            BaseField::Prime(p) => {
                *a.denominator_ref() == 1u32 && a.sign() != Ordering::Less && *a.numerator_ref() < *p
            }
        }
    }
}

impl fmt::Display for BaseField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BaseField::Rational => write!(f, "Q"),
            BaseField::Prime(p) => write!(f, "F_{p}"),
        }
    }
}

impl Serialize for BaseField {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            BaseField::Rational => s.serialize_str("Q"),
            BaseField::Prime(p) => {
                let mut m = s.serialize_map(Some(1))?;
                m.serialize_entry("p", p)?;
                m.end()
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CurvePoint {
    Infinity,
    Affine { x: Coord, y: Coord },
}

impl CurvePoint {
    pub fn affine(x: Coord, y: Coord) -> Self {
        CurvePoint::Affine { x, y }
    }

    pub fn from_ints(x: i64, y: i64) -> Self {
        CurvePoint::affine(Coord::from(x), Coord::from(y))
    }

    pub fn is_infinity(&self) -> bool {
        matches!(self, CurvePoint::Infinity)
    }
}

impl fmt::Display for CurvePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CurvePoint::Infinity => write!(f, "O"),
            CurvePoint::Affine { x, y } => write!(f, "({x}, {y})"),
        }
    }
}

impl Serialize for CurvePoint {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            CurvePoint::Infinity => s.serialize_str("O"),
            CurvePoint::Affine { x, y } => {
                let mut m = s.serialize_map(Some(2))?;
                m.serialize_entry("x", &x.to_string())?;
                m.serialize_entry("y", &y.to_string())?;
                m.end()
            }
        }
    }
}

/// `y^2 = x^3 + A x + B`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EllipticCurve {
    field: BaseField,
    a: Coord,
    b: Coord,
}

impl EllipticCurve {
    pub fn new(field: BaseField, a: &Coord, b: &Coord) -> Result<Self, PicardError> {
        let a = field.element(a)?;
        let b = field.element(b)?;
        let disc = field.add(
            &field.mul(&field.int(4), &field.mul(&a, &field.mul(&a, &a))),
            &field.mul(&field.int(27), &field.mul(&b, &b)),
        );
        if disc == 0u32 {
            return Err(PicardError::Singular);
        }
        Ok(EllipticCurve { field, a, b })
    }

    pub fn field(&self) -> BaseField {
        self.field
    }

    pub fn a(&self) -> &Coord {
        &self.a
    }

    pub fn b(&self) -> &Coord {
        &self.b
    }

    /// Maps coordinates into the field and checks the curve equation.
    pub fn point(&self, x: &Coord, y: &Coord) -> Result<CurvePoint, PicardError> {
        let p = CurvePoint::affine(self.field.element(x)?, self.field.element(y)?);
        if !self.contains(&p) {
            return Err(PicardError::NotOnCurve(p.to_string()));
        }
        Ok(p)
    }

    pub fn contains(&self, p: &CurvePoint) -> bool {
        match p {
            CurvePoint::Infinity => true,
            CurvePoint::Affine { x, y } => {
                let f = &self.field;
                if !f.is_reduced(x) || !f.is_reduced(y) {
                    return false;
                }
                let rhs = f.add(&f.mul(x, &f.add(&f.mul(x, x), &self.a)), &self.b);
                f.mul(y, y) == rhs
            }
        }
    }

    pub fn neg(&self, p: &CurvePoint) -> CurvePoint {
        match p {
            CurvePoint::Infinity => CurvePoint::Infinity,
            CurvePoint::Affine { x, y } => CurvePoint::affine(x.clone(), self.field.neg(y)),
        }
    }

    /// Chord and tangent addition.
    pub fn add(&self, p: &CurvePoint, q: &CurvePoint) -> CurvePoint {
        let f = &self.field;
        let ((x1, y1), (x2, y2)) = match (p, q) {
            (CurvePoint::Infinity, _) => return q.clone(),
            (_, CurvePoint::Infinity) => return p.clone(),
            (CurvePoint::Affine { x: x1, y: y1 }, CurvePoint::Affine { x: x2, y: y2 }) => {
                ((x1, y1), (x2, y2))
            }
        };
        let lambda = if x1 == x2 {
            if f.add(y1, y2) == 0u32 {
                return CurvePoint::Infinity;
            }
            let num = f.add(&f.mul(&f.int(3), &f.mul(x1, x1)), &self.a);
            f.div(&num, &f.mul(&f.int(2), y1))
        } else {
            f.div(&f.sub(y2, y1), &f.sub(x2, x1))
        };
        let x3 = f.sub(&f.sub(&f.mul(&lambda, &lambda), x1), x2);
        let y3 = f.sub(&f.mul(&lambda, &f.sub(x1, &x3)), y1);
        CurvePoint::affine(x3, y3)
    }

    pub fn sub(&self, p: &CurvePoint, q: &CurvePoint) -> CurvePoint {
        self.add(p, &self.neg(q))
    }

    /// `[k] P` by double and add.
    pub fn scalar_mul(&self, k: i64, p: &CurvePoint) -> CurvePoint {
        let base = if k < 0 { self.neg(p) } else { p.clone() };
        let mut k = k.unsigned_abs();
        let mut acc = CurvePoint::Infinity;
        let mut run = base;
        while k > 0 {
            if k & 1 == 1 {
                acc = self.add(&acc, &run);
            }
            k >>= 1;
            if k > 0 {
                run = self.add(&run, &run);
            }
        }
        acc
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DivisorClass {
    pub degree: i64,
    pub point: CurvePoint,
}

impl DivisorClass {
    pub fn trivial() -> Self {
        DivisorClass { degree: 0, point: CurvePoint::Infinity }
    }

    pub fn is_trivial(&self) -> bool {
        self.degree == 0 && self.point.is_infinity()
    }
}

/// Class of `sum m_i P_i`.
pub fn class_of(curve: &EllipticCurve, divisor: &[(CurvePoint, i64)]) -> Result<DivisorClass, PicardError> {
    let mut degree = 0i64;
    let mut point = CurvePoint::Infinity;
    for (p, m) in divisor {
        if !curve.contains(p) {
            return Err(PicardError::NotOnCurve(p.to_string()));
        }
        degree += m;
        point = curve.add(&point, &curve.scalar_mul(*m, p));
    }
    Ok(DivisorClass { degree, point })
}

pub fn class_sum(curve: &EllipticCurve, a: &DivisorClass, b: &DivisorClass) -> DivisorClass {
    DivisorClass { degree: a.degree + b.degree, point: curve.add(&a.point, &b.point) }
}

fn class_scale(curve: &EllipticCurve, k: i64, a: &DivisorClass) -> DivisorClass {
    DivisorClass { degree: k * a.degree, point: curve.scalar_mul(k, &a.point) }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OrderWitness {
    pub bound: u64,
    /// `[m] P != O` for every `1 <= m <= bound`.
    pub passes: bool,
    pub first_vanishing: Option<u64>,
    /// True only over `Q` with `bound >= 12` and a pass.
    pub certifies_infinite_order: bool,
    pub verdict: String,
}

pub fn infinite_order_witness(
    curve: &EllipticCurve,
    p: &CurvePoint,
    bound: u64,
) -> Result<OrderWitness, PicardError> {
    if bound == 0 {
        return Err(PicardError::ZeroBound);
    }
    let mut acc = CurvePoint::Infinity;
    let mut first_vanishing = None;
    for m in 1..=bound {
        acc = curve.add(&acc, p);
        if acc.is_infinity() {
            first_vanishing = Some(m);
            break;
        }
    }
    let passes = first_vanishing.is_none();
    let certifies = passes && !curve.field.is_finite() && bound >= RATIONAL_TORSION_BOUND;
    let verdict = match (first_vanishing, curve.field) {
        (Some(m), _) => format!("torsion: order divides {m}"),
        (None, BaseField::Prime(_)) => format!("bounded check only: no [m]P = O for m <= {bound}"),
        (None, BaseField::Rational) if certifies => {
            "infinite order: rational torsion has order at most 12".to_string()
        }
        (None, BaseField::Rational) => format!("no [m]P = O for m <= {bound}; bound below 12, not certified"),
    };
    Ok(OrderWitness { bound, passes, first_vanishing, certifies_infinite_order: certifies, verdict })
}

/// `q_n = p (+) [n](q (-) p)`, the point with `n(q - p) + p ~ q_n`.
pub fn qn(curve: &EllipticCurve, p: &CurvePoint, q: &CurvePoint, n: i64) -> CurvePoint {
    curve.add(p, &curve.scalar_mul(n, &curve.sub(q, p)))
}

/// `q_1, ..., q_{n_max}`, each obtained from the previous by adding `q (-) p`.
pub fn qn_sequence(curve: &EllipticCurve, p: &CurvePoint, q: &CurvePoint, n_max: u64) -> Vec<CurvePoint> {
    let step = curve.sub(q, p);
    let mut out = Vec::with_capacity(n_max as usize);
    let mut cur = p.clone();
    for _ in 0..n_max {
        cur = curve.add(&cur, &step);
        out.push(cur.clone());
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Collision {
    pub m: u64,
    pub n: u64,
    /// `[n - m](q (-) p) = O`, which any collision forces.
    pub torsion_confirmed: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SequenceAudit {
    pub pairwise_distinct: bool,
    pub collisions: Vec<Collision>,
    /// Indices `n` with `q_n = q`.
    pub hits_q: Vec<u64>,
}

/// Indices are 1-based. Collisions are reported against the first
/// occurrence of each repeated point.
pub fn audit_sequence(
    curve: &EllipticCurve,
    p: &CurvePoint,
    q: &CurvePoint,
    points: &[CurvePoint],
) -> SequenceAudit {
    let mut keyed: Vec<(&CurvePoint, u64)> =
        points.iter().enumerate().map(|(i, pt)| (pt, i as u64 + 1)).collect();
    keyed.par_sort_unstable();
    let mut pairs = Vec::new();
    let mut start = 0;
    for i in 1..=keyed.len() {
        if i == keyed.len() || keyed[i].0 != keyed[start].0 {
            for k in start + 1..i {
                pairs.push((keyed[start].1, keyed[k].1));
            }
            start = i;
        }
    }
    let step = curve.sub(q, p);
    let mut collisions: Vec<Collision> = pairs
        .par_iter()
        .map(|&(m, n)| Collision {
            m,
            n,
            torsion_confirmed: curve.scalar_mul((n - m) as i64, &step).is_infinity(),
        })
        .collect();
    collisions.sort_by_key(|c| (c.m, c.n));
    let hits_q = points
        .iter()
        .enumerate()
        .filter(|(_, pt)| *pt == q)
        .map(|(i, _)| i as u64 + 1)
        .collect();
    SequenceAudit { pairwise_distinct: collisions.is_empty(), collisions, hits_q }
}

/// Classes of the intersection products on the blown-up surface, as fixed
/// rewrite rules: `E.E = -p`, `C.E = q`, `F_n.E_n = q_n`, `E_n.E_n = -p - q_n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IntersectionLedger {
    pub e_e: DivisorClass,
    pub c_e: DivisorClass,
    pub fn_en: DivisorClass,
    pub en_en: DivisorClass,
}

impl IntersectionLedger {
    pub fn new(
        curve: &EllipticCurve,
        p: &CurvePoint,
        q: &CurvePoint,
        q_n: &CurvePoint,
    ) -> Result<Self, PicardError> {
        Ok(IntersectionLedger {
            e_e: class_of(curve, &[(p.clone(), -1)])?,
            c_e: class_of(curve, &[(q.clone(), 1)])?,
            fn_en: class_of(curve, &[(q_n.clone(), 1)])?,
            en_en: class_of(curve, &[(p.clone(), -1), (q_n.clone(), -1)])?,
        })
    }

    /// `E.E = E_n . (E_n + F_n)` from the pullback of `E`.
    pub fn pullback_consistent(&self, curve: &EllipticCurve) -> bool {
        class_sum(curve, &self.en_en, &self.fn_en) == self.e_e
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RestrictionReport {
    pub n: u64,
    pub q_n: CurvePoint,
    /// `(-n Delta - E)|_E` taken as `n(q - p) + p`.
    pub restriction: DivisorClass,
    /// `(a_n^*(-n Delta - E) - F_n) . E_n`.
    pub class: DivisorClass,
    pub trivial: bool,
    /// The same sum with the `-F_n` term left out.
    pub perturbed: DivisorClass,
    pub perturbed_flagged: bool,
    pub ledger_consistent: bool,
    /// `Delta . E = C.E + E.E` from the ledger; degree 0 as the Zariski
    /// decomposition requires.
    pub delta_e: DivisorClass,
    /// `-n C.E - (n + 1) E.E` straight from the ledger.
    pub ledger_restriction: DivisorClass,
    /// Whether the ledger value agrees with `n(q - p) + p`. The two differ
    /// by the sign of `n(q - p)` unless `[2n](q - p) = O`.
    pub ledger_matches_stated: bool,
}

pub fn restriction_class(
    curve: &EllipticCurve,
    p: &CurvePoint,
    q: &CurvePoint,
    n: u64,
) -> Result<RestrictionReport, PicardError> {
    let k = n as i64;
    let q_n = qn(curve, p, q, k);
    let ledger = IntersectionLedger::new(curve, p, q, &q_n)?;
    let restriction = class_of(curve, &[(q.clone(), k), (p.clone(), 1 - k)])?;
    // Pulling back and meeting E_n computes the same class as meeting E.
    let class = class_sum(curve, &restriction, &class_scale(curve, -1, &ledger.fn_en));
    let perturbed = restriction.clone();
    let delta_e = class_sum(curve, &ledger.c_e, &ledger.e_e);
    let ledger_restriction = class_sum(
        curve,
        &class_scale(curve, -k, &ledger.c_e),
        &class_scale(curve, -(k + 1), &ledger.e_e),
    );
    Ok(RestrictionReport {
        n,
        trivial: class.is_trivial(),
        perturbed_flagged: !perturbed.is_trivial(),
        ledger_consistent: ledger.pullback_consistent(curve),
        ledger_matches_stated: ledger_restriction == restriction,
        q_n,
        restriction,
        class,
        perturbed,
        delta_e,
        ledger_restriction,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct QnReport {
    pub field: BaseField,
    #[serde(rename = "A", serialize_with = "serialize_coord")]
    pub a: Coord,
    #[serde(rename = "B", serialize_with = "serialize_coord")]
    pub b: Coord,
    pub p: CurvePoint,
    pub q: CurvePoint,
    pub n_max: u64,
    pub witness: OrderWitness,
    /// `q_1, ..., q_{n_max}`.
    pub points: Vec<CurvePoint>,
    pub audit: SequenceAudit,
    /// `q_1 = q` always; the claim `q_n != q` is checked for `n >= 2`.
    pub avoids_q_from_two: bool,
    /// `p (+) [n](p (-) q)`, the points matching the sign the ledger produces.
    pub opposite_sign_points: Vec<CurvePoint>,
    pub opposite_sign_audit: SequenceAudit,
    pub restriction: Vec<RestrictionReport>,
    pub audit_flags: Vec<String>,
}

fn serialize_coord<S: Serializer>(c: &Coord, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&c.to_string())
}

pub fn qn_report(
    curve: &EllipticCurve,
    p: &CurvePoint,
    q: &CurvePoint,
    n_max: u64,
    bound: u64,
    restriction_max: u64,
) -> Result<QnReport, PicardError> {
    for pt in [p, q] {
        if !curve.contains(pt) {
            return Err(PicardError::NotOnCurve(pt.to_string()));
        }
    }
    if p == q {
        return Err(PicardError::EqualBasePoints);
    }
    if n_max == 0 {
        return Err(PicardError::EmptySequence);
    }
    let step = curve.sub(q, p);
    let witness = infinite_order_witness(curve, &step, bound)?;
    let points = qn_sequence(curve, p, q, n_max);
    let audit = audit_sequence(curve, p, q, &points);
    let avoids_q_from_two = audit.hits_q.iter().all(|&n| n == 1);
    let opposite_sign_points = qn_sequence(curve, p, &curve.sub(&curve.add(p, p), q), n_max);
    let opposite_sign_audit = audit_sequence(curve, p, q, &opposite_sign_points);
    let restriction = (1..=restriction_max.min(n_max))
        .map(|n| restriction_class(curve, p, q, n))
        .collect::<Result<Vec<_>, _>>()?;

    let mut flags = Vec::new();
    if let BaseField::Prime(p) = curve.field {
        flags.push(format!("truncation: over F_{p} every point is torsion, so q_n must repeat"));
    }
    if witness.certifies_infinite_order && !audit.pairwise_distinct {
        flags.push("distinctness: collision despite infinite order".to_string());
    }
    if !avoids_q_from_two {
        flags.push(format!("q_avoidance: q_n = q at n = {:?}", audit.hits_q));
    }
    if audit.collisions.iter().any(|c| !c.torsion_confirmed) {
        flags.push("collision_implication: a collision without [n - m](q - p) = O".to_string());
    }
    if let Some(r) = restriction.iter().find(|r| !r.trivial) {
        flags.push(format!("restriction: nontrivial class at n = {}", r.n));
    }
    if restriction.iter().any(|r| !r.ledger_consistent) {
        flags.push("ledger: E_n.E_n + F_n.E_n differs from E.E".to_string());
    }
    if restriction.iter().any(|r| r.delta_e.degree != 0) {
        flags.push("ledger: Delta.E has nonzero degree".to_string());
    }
    if let Some(r) = restriction.iter().find(|r| !r.ledger_matches_stated) {
        flags.push(format!(
            "restriction_sign: ledger gives -n(q - p) + p, stated n(q - p) + p (first differs at n = {})",
            r.n
        ));
    }
    Ok(QnReport {
        field: curve.field,
        a: curve.a.clone(),
        b: curve.b.clone(),
        p: p.clone(),
        q: q.clone(),
        n_max,
        witness,
        points,
        audit,
        avoids_q_from_two,
        opposite_sign_points,
        opposite_sign_audit,
        restriction,
        audit_flags: flags,
    })
}

#[derive(Deserialize)]
#[serde(untagged)]
enum FieldDoc {
    Name(String),
    Prime {
        p: u64,
    },
}

#[derive(Deserialize)]
#[serde(untagged)]
enum PointDoc {
    Name(String),
    Affine { x: String, y: String },
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PointsDoc {
    p: PointDoc,
    q: PointDoc,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CurveDoc {
    field: FieldDoc,
    #[serde(rename = "A")]
    a: String,
    #[serde(rename = "B")]
    b: String,
    points: PointsDoc,
}

/// A curve with its two marked points `p` and `q`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CurveInput {
    pub curve: EllipticCurve,
    pub p: CurvePoint,
    pub q: CurvePoint,
}

fn point_from_doc(curve: &EllipticCurve, doc: &PointDoc) -> Result<CurvePoint, PicardError> {
    match doc {
        PointDoc::Name(s) if s == "O" => Ok(CurvePoint::Infinity),
        PointDoc::Name(s) => Err(PicardError::Json(format!("unknown point name {s:?}"))),
        PointDoc::Affine { x, y } => curve.point(&parse_coord(x)?, &parse_coord(y)?),
    }
}

pub fn curve_from_json(text: &str) -> Result<CurveInput, PicardError> {
    let doc: CurveDoc = serde_json::from_str(text).map_err(|e| PicardError::Json(e.to_string()))?;
    let field = match doc.field {
        FieldDoc::Name(s) if s == "Q" => BaseField::Rational,
        FieldDoc::Name(s) => return Err(PicardError::Json(format!("unknown field {s:?}"))),
        FieldDoc::Prime { p } => BaseField::prime(p)?,
    };
    let curve = EllipticCurve::new(field, &parse_coord(&doc.a)?, &parse_coord(&doc.b)?)?;
    let p = point_from_doc(&curve, &doc.points.p)?;
    let q = point_from_doc(&curve, &doc.points.q)?;
    Ok(CurveInput { curve, p, q })
}

/// `y^2 = x^3 - 2` over `Q` with `p = O`, `q = (3, 5)`.
pub fn default_instance() -> CurveInput {
    let curve = EllipticCurve::new(BaseField::Rational, &Coord::from(0), &Coord::from(-2))
        .expect("nonsingular");
    CurveInput { curve, p: CurvePoint::Infinity, q: CurvePoint::from_ints(3, 5) }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(p: i64, q: i64) -> Coord {
        coord(p, q)
    }

    fn q_curve(a: i64, b: i64) -> EllipticCurve {
        EllipticCurve::new(BaseField::Rational, &r(a, 1), &r(b, 1)).unwrap()
    }

    #[test]
    fn primality() {
        let primes: Vec<u64> = (0..60).filter(|&n| is_prime(n)).collect();
        assert_eq!(primes, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59]);
        assert!(is_prime(18_446_744_073_709_551_557));
        assert!(!is_prime(3_215_031_751));
        assert!(BaseField::prime(2).is_err());
        assert!(BaseField::prime(91).is_err());
    }

    #[test]
    fn doubling_example() {
        let c = default_instance();
        let q = &c.q;
        let two_q = CurvePoint::affine(r(129, 100), r(-383, 1000));
        assert_eq!(c.curve.add(q, q), two_q);
        assert_eq!(c.curve.scalar_mul(2, q), two_q);
        assert!(c.curve.contains(&two_q));
        assert_eq!(c.curve.scalar_mul(0, q), CurvePoint::Infinity);
        assert_eq!(c.curve.scalar_mul(1, q), *q);
        assert_eq!(c.curve.add(q, &CurvePoint::Infinity), *q);
        assert_eq!(c.curve.add(q, &c.curve.neg(q)), CurvePoint::Infinity);
        assert_eq!(c.curve.scalar_mul(-3, q), c.curve.neg(&c.curve.scalar_mul(3, q)));
    }

    #[test]
    fn singular_and_off_curve() {
        assert_eq!(
            EllipticCurve::new(BaseField::Rational, &r(-3, 1), &r(2, 1)),
            Err(PicardError::Singular)
        );
        let c = q_curve(0, -2);
        assert!(c.point(&r(3, 1), &r(4, 1)).is_err());
        let f7 = BaseField::prime(7).unwrap();
        assert!(EllipticCurve::new(f7, &r(1, 7), &r(1, 1)).is_err());
    }

    #[test]
    fn classes() {
        let c = default_instance();
        let (p, q) = (&c.p, &c.q);
        assert_eq!(class_of(&c.curve, &[]).unwrap(), DivisorClass::trivial());
        assert!(class_of(&c.curve, &[(q.clone(), 1), (q.clone(), -1)]).unwrap().is_trivial());
        for n in 0..5i64 {
            let cls = class_of(&c.curve, &[(q.clone(), n), (p.clone(), 1 - n)]).unwrap();
            assert_eq!(cls.degree, 1);
            assert_eq!(cls.point, qn(&c.curve, p, q, n));
        }
    }

    #[test]
    fn witness_examples() {
        let c = default_instance();
        let w = infinite_order_witness(&c.curve, &c.q, 12).unwrap();
        assert!(w.passes && w.certifies_infinite_order);
        let w = infinite_order_witness(&c.curve, &CurvePoint::Infinity, 12).unwrap();
        assert_eq!(w.first_vanishing, Some(1));
        let t = q_curve(0, 1);
        let w = infinite_order_witness(&t, &CurvePoint::from_ints(-1, 0), 12).unwrap();
        assert_eq!(w.first_vanishing, Some(2));
        let w = infinite_order_witness(&t, &CurvePoint::from_ints(2, 3), 12).unwrap();
        assert_eq!(w.first_vanishing, Some(6));
        let w = infinite_order_witness(&c.curve, &c.q, 5).unwrap();
        assert!(w.passes && !w.certifies_infinite_order);
    }

    #[test]
    fn sequence_start() {
        let c = default_instance();
        let s = qn_sequence(&c.curve, &c.p, &c.q, 4);
        assert_eq!(s[0], c.q);
        assert_eq!(s[1], CurvePoint::affine(r(129, 100), r(-383, 1000)));
        for (i, pt) in s.iter().enumerate() {
            assert_eq!(*pt, qn(&c.curve, &c.p, &c.q, i as i64 + 1));
        }
        assert_eq!(qn(&c.curve, &c.p, &c.q, 0), c.p);
    }

    #[test]
    fn torsion_collisions_are_reported() {
        let t = q_curve(0, 1);
        let p = CurvePoint::Infinity;
        let q = CurvePoint::from_ints(2, 3);
        let pts = qn_sequence(&t, &p, &q, 14);
        let audit = audit_sequence(&t, &p, &q, &pts);
        assert!(!audit.pairwise_distinct);
        assert!(audit.collisions.iter().all(|c| c.torsion_confirmed && (c.n - c.m) % 6 == 0));
        assert_eq!(audit.collisions[0].m, 1);
        assert_eq!(audit.collisions[0].n, 7);
        assert_eq!(audit.hits_q, vec![1, 7, 13]);
    }

    #[test]
    fn restriction_examples() {
        let c = default_instance();
        for n in 1..=6 {
            let rep = restriction_class(&c.curve, &c.p, &c.q, n).unwrap();
            assert!(rep.trivial, "n = {n}");
            assert!(rep.ledger_consistent);
            assert_eq!(rep.perturbed.degree, 1);
            assert!(rep.perturbed_flagged);
            assert_eq!(rep.delta_e.degree, 0);
            assert!(!rep.ledger_matches_stated);
        }
    }

    #[test]
    fn prime_field_arithmetic() {
        let f = BaseField::prime(97).unwrap();
        let c = EllipticCurve::new(f, &r(2, 1), &r(3, 1)).unwrap();
        let pts: Vec<CurvePoint> = (0..97)
            .flat_map(|x| (0..97).map(move |y| (x, y)))
            .filter_map(|(x, y)| c.point(&r(x, 1), &r(y, 1)).ok())
            .collect();
        let order = pts.len() as i64 + 1;
        // Hasse: |#E - 98| <= 2 sqrt 97.
        assert!((order - 98).abs() <= 19);
        for p in pts.iter().take(10) {
            assert!(c.scalar_mul(order, p).is_infinity());
        }
        let w = infinite_order_witness(&c, &pts[0], 5).unwrap();
        assert!(!w.certifies_infinite_order);
    }

    #[test]
    fn curve_json() {
        let text = r#"{"field":"Q","A":"0","B":"-2","points":{"p":"O","q":{"x":"3","y":"5"}}}"#;
        assert_eq!(curve_from_json(text).unwrap(), default_instance());
        let f = r#"{"field":{"p":101},"A":"1","B":"1","points":{"p":"O","q":"O"}}"#;
        assert_eq!(curve_from_json(f).unwrap().curve.field(), BaseField::Prime(101));
        for bad in [
            r#"{"field":"R","A":"0","B":"-2","points":{"p":"O","q":"O"}}"#,
            r#"{"field":{"p":100},"A":"0","B":"-2","points":{"p":"O","q":"O"}}"#,
            r#"{"field":"Q","A":"0","B":"-2","points":{"p":"O","q":{"x":"3","y":"4"}}}"#,
            r#"{"field":"Q","A":"0","B":"-2","points":{"p":"X","q":"O"}}"#,
            r#"{"field":"Q","A":"0","B":"-2","points":{"p":"O","q":"O"},"extra":1}"#,
            r#"{"field":"Q","A":"0.5","B":"-2","points":{"p":"O","q":"O"}}"#,
        ] {
            assert!(curve_from_json(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn serialization() {
        let c = default_instance();
        assert_eq!(serde_json::to_string(&c.p).unwrap(), "\"O\"");
        assert_eq!(serde_json::to_string(&c.q).unwrap(), r#"{"x":"3","y":"5"}"#);
        assert_eq!(serde_json::to_string(&BaseField::Prime(7)).unwrap(), r#"{"p":7}"#);
    }
}
