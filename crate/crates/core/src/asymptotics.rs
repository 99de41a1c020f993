//! Multiplicity and first-difference subsequence limits for the length
//! model `L(n) = (1/6) p3(ceil(alpha n), n) + (1/4) p2(ceil(alpha n), n)`,
//! the Cesaro consistency oracle, and exact large-`n` scans of
//! `Delta(n) = L(n+1) - L(n)`.
//!
//! `p3` is the cubic `(D_n^3)` and `p2` the quadratic `(D_n^2 . K)` in the
//! variables `x = ceil(alpha n)`, `y = n`. The remainder of the true length
//! function is `O(n)` and is not modelled; `remainder_slope` is the band
//! used when comparing first differences against their leading term.

use std::collections::BTreeMap;
use std::ops::Range;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::intersection::{
    canonical_class, example_dn, example_form, BivariatePolynomial, IntersectionError,
    IntersectionForm,
};
use crate::quadfield::{example_alpha, FloorKernel, QuadExt, Rational};
use crate::serde_util;

const SCAN_CHUNK: u64 = 1 << 12;

/// Digits used for decimal columns of scan tables.
pub const SCAN_DIGITS: usize = 15;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AsymptoticsError {
    #[error("alpha must be irrational with 0 < alpha < 1, got {0}")]
    AlphaOutOfRange(String),
    #[error("cubic part must be homogeneous of degree 3: {0}")]
    CubicNotHomogeneous(String),
    #[error("quadratic part must be homogeneous of degree 2: {0}")]
    QuadraticNotHomogeneous(String),
    #[error("remainder slope must be nonnegative")]
    NegativeSlope,
    #[error("scan needs n_max >= 10, got {0}")]
    ScanTooShort(u64),
    #[error("sample stride must be positive")]
    ZeroStride,
    #[error(transparent)]
    Intersection(#[from] IntersectionError),
}

/// Values printed alongside the worked example, kept for auditing only.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrintedClaims {
    /// `lim (D_n^3)/n^3 = 12042/169 - (27/169) sqrt 3`.
    pub cubic_limit: QuadExt,
    /// `e = 72252/169 - (162/169) sqrt 3`.
    pub multiplicity: QuadExt,
    /// Closed form printed for the `Sigma_1` limit.
    pub sigma1_closed: QuadExt,
    /// Closed form printed for the `Sigma_2` limit.
    pub sigma2_closed: QuadExt,
    /// The two `n^2` coefficients printed for `(D_n^2 . K)`: `-175` in the
    /// assembled quadratic, `-174` in the numeric length formula.
    pub f2k_printed: (i64, i64),
}

impl PrintedClaims {
    pub fn example() -> Self {
        let d = example_alpha().radicand();
        PrintedClaims {
            cubic_limit: QuadExt::from_parts(12042, 169, -27, 169, d),
            multiplicity: QuadExt::from_parts(72252, 169, -162, 169, d),
            sigma1_closed: QuadExt::from_parts(144504, 4056, -324, 4056, d),
            sigma2_closed: QuadExt::from_parts(106596, 4056, -4536, 4056, d),
            f2k_printed: (-175, -174),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExampleModel {
    alpha: QuadExt,
    p3: BivariatePolynomial,
    p2: BivariatePolynomial,
    remainder_slope: Rational,
    printed: Option<PrintedClaims>,
}

impl ExampleModel {
    pub fn new(
        alpha: QuadExt,
        p3: BivariatePolynomial,
        p2: BivariatePolynomial,
        remainder_slope: Rational,
    ) -> Result<Self, AsymptoticsError> {
        let one = QuadExt::one(alpha.radicand());
        if alpha.is_rational() || alpha.sign() <= 0 || alpha >= one {
            return Err(AsymptoticsError::AlphaOutOfRange(alpha.to_string()));
        }
        if p3.is_zero() || !p3.is_homogeneous(3) {
            return Err(AsymptoticsError::CubicNotHomogeneous(p3.to_string()));
        }
        if !p2.is_homogeneous(2) {
            return Err(AsymptoticsError::QuadraticNotHomogeneous(p2.to_string()));
        }
        if remainder_slope.is_negative() {
            return Err(AsymptoticsError::NegativeSlope);
        }
        Ok(ExampleModel { alpha, p3, p2, remainder_slope, printed: None })
    }

    /// Builds `p3 = (D_n^3)` and `p2 = (D_n^2 . K)` from an intersection
    /// table with generators `S`, `F`, `K`, where `D_n = x S + y F`.
    pub fn from_form(
        form: &IntersectionForm,
        alpha: QuadExt,
        remainder_slope: Rational,
    ) -> Result<Self, AsymptoticsError> {
        let dn = example_dn();
        let p3 = form.triple_product(&dn, &dn, &dn)?;
        let p2 = form.triple_product(&dn, &dn, &canonical_class())?;
        Self::new(alpha, p3, p2, remainder_slope)
    }

    /// The worked example with its printed claims attached.
    pub fn example() -> Self {
        Self::from_form(&example_form(), example_alpha(), default_remainder_slope())
            .expect("example model is valid")
            .with_printed_claims(PrintedClaims::example())
    }

    pub fn with_printed_claims(mut self, claims: PrintedClaims) -> Self {
        self.printed = Some(claims);
        self
    }

    pub fn alpha(&self) -> &QuadExt {
        &self.alpha
    }

    pub fn cubic(&self) -> &BivariatePolynomial {
        &self.p3
    }

    pub fn quadratic(&self) -> &BivariatePolynomial {
        &self.p2
    }

    pub fn remainder_slope(&self) -> &Rational {
        &self.remainder_slope
    }

    pub fn printed(&self) -> Option<&PrintedClaims> {
        self.printed.as_ref()
    }

    fn principal_part(&self) -> BivariatePolynomial {
        let sixth = Rational::new(1.into(), 6.into());
        let quarter = Rational::new(1.into(), 4.into());
        &self.p3.scale(&sixth) + &self.p2.scale(&quarter)
    }

    fn one(&self) -> QuadExt {
        QuadExt::one(self.alpha.radicand())
    }
}

/// Default bound on `|Delta(n) - L_sigma n^2| / n` used by scans.
pub fn default_remainder_slope() -> Rational {
    Rational::from_integer(1000.into())
}

/// `L(n)` without the `O(n)` remainder.
pub fn model_length(model: &ExampleModel, n: u64) -> Rational {
    model.principal_part().evaluate_at_n(&model.alpha, n)
}

/// `(p3(alpha, 1), 6 p3(alpha, 1))`: the limit of `(D_n^3)/n^3`, and that
/// value scaled by `3!`.
pub fn multiplicity(model: &ExampleModel) -> (QuadExt, QuadExt) {
    let lim = model.p3.evaluate(&model.alpha, &model.one()).expect("same field");
    let scaled = lim.scale(&Rational::from_integer(6.into()));
    (lim, scaled)
}

/// Degree-2 part of `p3(x + sigma, y + 1) - p3(x, y)`.
pub fn leading_difference(model: &ExampleModel, sigma: i64) -> BivariatePolynomial {
    model.p3.difference(sigma).homogeneous_part(2)
}

/// Limit of `Delta(n)/n^2` along `{n : sigma_alpha(n) = sigma}`.
pub fn subsequence_limit(model: &ExampleModel, sigma: i64) -> QuadExt {
    let q2 = leading_difference(model, sigma);
    q2.evaluate(&model.alpha, &model.one())
        .expect("same field")
        .scale(&Rational::new(1.into(), 6.into()))
}

/// `(1/6)(918 alpha^2 - 810 alpha + 324)`, the printed `Sigma_2` expression.
pub fn printed_sigma2(model: &ExampleModel) -> QuadExt {
    printed_expression(&model.alpha, [918, -810, 324])
}

/// `(1/6)(-486 alpha^2 + 324 alpha + 162)`, the printed `Sigma_1` expression.
pub fn printed_sigma1(model: &ExampleModel) -> QuadExt {
    printed_expression(&model.alpha, [-486, 324, 162])
}

fn printed_expression(alpha: &QuadExt, [c2, c1, c0]: [i64; 3]) -> QuadExt {
    BivariatePolynomial::from_int_terms(&[(c2, 2, 0), (c1, 1, 1), (c0, 0, 2)])
        .evaluate(alpha, &QuadExt::one(alpha.radicand()))
        .expect("same field")
        .scale(&Rational::new(1.into(), 6.into()))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CesaroVerdict {
    pub lhs: QuadExt,
    pub rhs: QuadExt,
    pub pass: bool,
}

/// Averages the two subsequence limits by the densities `1 - alpha` and
/// `alpha` of `Sigma_1` and `Sigma_2`. Summing `Delta(n) ~ L n^2` up to `N`
/// gives `L_avg N^3 / 3`, which must match `L(N) ~ p3(alpha, 1) N^3 / 6`,
/// so the average must equal `p3(alpha, 1) / 2`.
pub fn cesaro_consistency(model: &ExampleModel, l0: &QuadExt, l1: &QuadExt) -> CesaroVerdict {
    let alpha = &model.alpha;
    let lhs = (model.one() - alpha) * l0 + alpha * l1;
    let rhs = multiplicity(model).0.scale(&Rational::new(1.into(), 2.into()));
    let pass = lhs == rhs;
    CesaroVerdict { lhs, rhs, pass }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LimitReport {
    pub alpha: QuadExt,
    pub cubic: String,
    pub quadratic: String,
    pub lim_dn3_over_n3: QuadExt,
    pub printed_multiplicity: QuadExt,
    #[serde(serialize_with = "serde_util::int_keyed")]
    pub sigma_limits: BTreeMap<i64, QuadExt>,
    #[serde(serialize_with = "serde_util::int_keyed")]
    pub printed_sigma_limits: BTreeMap<i64, QuadExt>,
    pub cesaro_lhs: QuadExt,
    pub cesaro_rhs: QuadExt,
    pub cesaro_pass: bool,
    pub printed_cesaro: Option<CesaroVerdict>,
    pub limit_exists: bool,
    pub audit_flags: Vec<String>,
}

/// Assembles every derived quantity and compares it against the printed
/// claims, if the model carries any.
pub fn limit_exists_report(model: &ExampleModel) -> LimitReport {
    let (lim, scaled) = multiplicity(model);
    let l0 = subsequence_limit(model, 0);
    let l1 = subsequence_limit(model, 1);
    let derived = cesaro_consistency(model, &l0, &l1);
    let limit_exists = l0 == l1;
    let mut flags = Vec::new();
    if !derived.pass {
        flags.push(format!(
            "cesaro: derived limits fail the density average ({} vs {})",
            dec(&derived.lhs),
            dec(&derived.rhs)
        ));
    }

    let mut printed_limits = BTreeMap::new();
    let mut printed_cesaro = None;
    if let Some(claims) = model.printed() {
        let p0 = printed_sigma1(model);
        let p1 = printed_sigma2(model);
        if p0 != claims.sigma1_closed {
            flags.push(format!(
                "sigma1_printed_closed_form: expression evaluates to {p0}, printed as {}",
                claims.sigma1_closed
            ));
        }
        if p1 != claims.sigma2_closed {
            flags.push(format!(
                "sigma2_printed_closed_form: expression evaluates to {p1}, printed as {}",
                claims.sigma2_closed
            ));
        }
        if p0 != l0 {
            flags.push(format!("sigma1_mismatch: derived {l0}, printed {p0}"));
        }
        if p1 != l1 {
            flags.push(format!(
                "sigma2_mismatch: derived (1/6)({}) = {} ({}), printed (1/6)(918a^2 - 810a + 324) = {} ({})",
                leading_difference(model, 1),
                l1,
                dec(&l1),
                p1,
                dec(&p1)
            ));
        }
        let verdict = cesaro_consistency(model, &p0, &p1);
        if !verdict.pass {
            flags.push(format!(
                "printed_cesaro_failure: (1-a) L0 + a L1 = {} but p3(a,1)/2 = {}",
                dec(&verdict.lhs),
                dec(&verdict.rhs)
            ));
        }
        printed_cesaro = Some(verdict);
        if lim != claims.cubic_limit {
            flags.push(format!("cubic_limit_mismatch: derived {lim}, printed {}", claims.cubic_limit));
        }
        if scaled == claims.multiplicity {
            flags.push(format!(
                "multiplicity_scaling: printed e = {} equals 3! * {} = 6 * lim (D_n^3)/n^3, \
                 while (1/6)(D_n^3) in the length model gives 3! * lim L(n)/n^3 = {}",
                claims.multiplicity, claims.cubic_limit, lim
            ));
        } else {
            flags.push(format!(
                "multiplicity_mismatch: 6 * p3(a,1) = {scaled}, printed {}",
                claims.multiplicity
            ));
        }
        let (used, other) = claims.f2k_printed;
        flags.push(format!(
            "f2k_coefficient: (D_n^2 . K) n^2 coefficient printed as {used} and as {other}; model uses {}",
            model.p2.coefficient(0, 2)
        ));
        if limit_exists {
            flags.push(
                "limit_existence: derived subsequence limits coincide, so the first-difference \
                 limit exists for this model, contrary to the printed conclusion"
                    .to_string(),
            );
        }
        printed_limits.insert(0, p0);
        printed_limits.insert(1, p1);
    }

    LimitReport {
        alpha: model.alpha.clone(),
        cubic: model.p3.to_string(),
        quadratic: model.p2.to_string(),
        lim_dn3_over_n3: lim,
        printed_multiplicity: scaled,
        sigma_limits: BTreeMap::from([(0, l0), (1, l1)]),
        printed_sigma_limits: printed_limits,
        cesaro_lhs: derived.lhs,
        cesaro_rhs: derived.rhs,
        cesaro_pass: derived.pass,
        printed_cesaro,
        limit_exists,
        audit_flags: flags,
    }
}

fn dec(x: &QuadExt) -> String {
    x.to_decimal(6).expect("6 digits in range")
}

/// `M * (p3/6 + p2/4)` with integer coefficients, for fast exact evaluation.
#[derive(Debug, Clone)]
struct LengthKernel {
    terms: Vec<((u32, u32), BigInt)>,
    denom: BigInt,
}

impl LengthKernel {
    fn new(model: &ExampleModel) -> Self {
        let poly = model.principal_part();
        let denom = poly.terms().fold(BigInt::one(), |acc, (_, c)| acc.lcm(c.denom()));
        let terms = poly
            .terms()
            .map(|(e, c)| (e, (c * Rational::from_integer(denom.clone())).to_integer()))
            .collect();
        LengthKernel { terms, denom }
    }

    /// `M L(n)` given `x = ceil(alpha n)`.
    fn numerator(&self, x: &BigInt, n: u64) -> BigInt {
        let y = BigInt::from(n);
        self.terms.iter().fold(BigInt::zero(), |acc, ((ex, ey), c)| {
            acc + c * num_traits::pow(x.clone(), *ex as usize) * num_traits::pow(y.clone(), *ey as usize)
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ScanRow {
    pub n: u64,
    pub sigma: i64,
    #[serde(serialize_with = "serde_util::bigint")]
    pub ceil_alpha_n: BigInt,
    #[serde(serialize_with = "serde_util::rational")]
    pub delta: Rational,
    #[serde(serialize_with = "serde_util::rational")]
    pub delta_over_n2: Rational,
}

impl ScanRow {
    pub fn delta_over_n2_decimal(&self) -> String {
        rational_decimal(&self.delta_over_n2, SCAN_DIGITS)
    }
}

/// Renders a rational through the quadratic-field decimal routine.
pub fn rational_decimal(r: &Rational, digits: usize) -> String {
    let d = example_alpha().radicand();
    QuadExt::from_rational(r.clone(), d).to_decimal(digits).expect("digits in range")
}

/// Extremes of `Delta(n)/n^2` over one residue class of `sigma`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RatioExtremes {
    pub count: u64,
    #[serde(serialize_with = "serde_util::rational")]
    pub min: Rational,
    pub min_at: u64,
    #[serde(serialize_with = "serde_util::rational")]
    pub max: Rational,
    pub max_at: u64,
    /// Ratio at the largest `n` of the class.
    #[serde(serialize_with = "serde_util::rational")]
    pub last: Rational,
    pub last_at: u64,
}

impl RatioExtremes {
    /// `(max - min) / max`.
    pub fn relative_spread(&self) -> Rational {
        if self.max.is_zero() {
            return Rational::zero();
        }
        ((&self.max - &self.min) / &self.max).abs()
    }
}

/// `Delta(n) = num / (M n^2)` kept unreduced; all ratios in one scan share `M`.
#[derive(Debug, Clone)]
struct RawRatio {
    num: BigInt,
    n: u64,
}

impl RawRatio {
    /// Compares `a/(M a.n^2)` with `b/(M b.n^2)`.
    fn cmp(&self, other: &RawRatio) -> std::cmp::Ordering {
        let l = &self.num * BigInt::from(other.n) * other.n;
        let r = &other.num * BigInt::from(self.n) * self.n;
        l.cmp(&r)
    }

    fn to_rational(&self, denom: &BigInt) -> Rational {
        Rational::new(self.num.clone(), denom * BigInt::from(self.n) * self.n)
    }
}

#[derive(Debug, Clone)]
struct RawExtremes {
    count: u64,
    min: RawRatio,
    max: RawRatio,
    last: RawRatio,
}

impl RawExtremes {
    fn single(r: RawRatio) -> Self {
        RawExtremes { count: 1, min: r.clone(), max: r.clone(), last: r }
    }

    fn absorb(&mut self, r: &RawRatio) {
        self.count += 1;
        if r.cmp(&self.min).is_lt() {
            self.min = r.clone();
        }
        if r.cmp(&self.max).is_gt() {
            self.max = r.clone();
        }
        if r.n > self.last.n {
            self.last = r.clone();
        }
    }

    fn merge(mut self, o: RawExtremes) -> Self {
        let count = self.count + o.count;
        self.absorb(&o.min);
        self.absorb(&o.max);
        self.absorb(&o.last);
        self.count = count;
        self
    }

    fn finish(&self, denom: &BigInt) -> RatioExtremes {
        RatioExtremes {
            count: self.count,
            min: self.min.to_rational(denom),
            min_at: self.min.n,
            max: self.max.to_rational(denom),
            max_at: self.max.n,
            last: self.last.to_rational(denom),
            last_at: self.last.n,
        }
    }
}

type RawMap = BTreeMap<i64, RawExtremes>;

fn record(map: &mut RawMap, sigma: i64, r: &RawRatio) {
    match map.get_mut(&sigma) {
        Some(e) => e.absorb(r),
        None => {
            map.insert(sigma, RawExtremes::single(r.clone()));
        }
    }
}

fn merge_maps(mut a: RawMap, b: RawMap) -> RawMap {
    for (k, v) in b {
        let merged = match a.remove(&k) {
            Some(old) => old.merge(v),
            None => v,
        };
        a.insert(k, merged);
    }
    a
}

/// Sign of `a + b sqrt(d)` for integers.
fn int_quad_sign(a: &BigInt, b: &BigInt, d: &BigInt) -> std::cmp::Ordering {
    use std::cmp::Ordering::*;
    let sa = a.sign();
    let sb = b.sign();
    let (za, zb) = (a.is_zero(), b.is_zero());
    if zb {
        return a.cmp(&BigInt::zero());
    }
    if za || sa == sb {
        return b.cmp(&BigInt::zero());
    }
    let a2 = a * a;
    let b2d = b * b * d;
    match (a2.cmp(&b2d), a.is_positive()) {
        (Greater, true) | (Less, false) => Greater,
        (Greater, false) | (Less, true) => Less,
        (Equal, _) => Equal,
    }
}

/// `|Delta(n) - L_sigma n^2| / n = (t + u sqrt d) / (M R n)` with `t + u sqrt d >= 0`.
#[derive(Debug, Clone)]
struct Deviation {
    t: BigInt,
    u: BigInt,
    n: u64,
}

impl Deviation {
    fn exceeds(&self, other: &Deviation, d: &BigInt) -> bool {
        let a = &self.t * other.n - &other.t * self.n;
        let b = &self.u * other.n - &other.u * self.n;
        int_quad_sign(&a, &b, d).is_gt()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ScanTable {
    pub n_max: u64,
    pub stride: u64,
    pub rows: Vec<ScanRow>,
    /// Per-`sigma` extremes over `1..=n_max`.
    #[serde(serialize_with = "serde_util::int_keyed")]
    pub extremes: BTreeMap<i64, RatioExtremes>,
    /// Per-`sigma` extremes over the tail `tail_start..=n_max`.
    pub tail_start: u64,
    #[serde(serialize_with = "serde_util::int_keyed")]
    pub tail_extremes: BTreeMap<i64, RatioExtremes>,
    /// `sum_{n=0}^{n_max} Delta(n) == L(n_max + 1)`.
    pub telescoping_ok: bool,
    /// Smallest `N` with `Delta(n) >= 0` for all `N <= n <= n_max`.
    pub monotone_from: u64,
    /// `ceil(max Delta(n)/n^2) + 1` over the sampled rows.
    #[serde(serialize_with = "serde_util::bigint")]
    pub bound_constant: BigInt,
    /// Every scanned `n` satisfies `Delta(n) <= bound_constant n^2`.
    pub bound_holds: bool,
    /// `max |Delta(n) - L_sigma n^2| / n` over `1..=n_max`.
    pub estimated_remainder_slope: QuadExt,
    pub estimated_remainder_slope_at: u64,
    /// Whether the estimate stays within the model's `remainder_slope`.
    pub within_remainder_band: bool,
}

#[derive(Debug, Clone)]
struct ChunkStats {
    rows: Vec<ScanRow>,
    extremes: RawMap,
    tail: RawMap,
    delta_sum: BigInt,
    last_negative: Option<u64>,
    worst: Option<Deviation>,
}

struct ScanContext {
    kernel: LengthKernel,
    neg_alpha: FloorKernel,
    /// `L_sigma = (p + q sqrt d) / limit_den` for `sigma = 0, 1`.
    limits: [(BigInt, BigInt); 2],
    limit_den: BigInt,
    d: BigInt,
    stride: u64,
    tail_start: u64,
}

impl ScanContext {
    fn empty(&self) -> ChunkStats {
        ChunkStats {
            rows: Vec::new(),
            extremes: RawMap::new(),
            tail: RawMap::new(),
            delta_sum: BigInt::zero(),
            last_negative: None,
            worst: None,
        }
    }

    fn merge(&self, mut a: ChunkStats, b: ChunkStats) -> ChunkStats {
        a.rows.extend(b.rows);
        a.extremes = merge_maps(a.extremes, b.extremes);
        a.tail = merge_maps(a.tail, b.tail);
        a.delta_sum += b.delta_sum;
        a.last_negative = a.last_negative.max(b.last_negative);
        a.worst = match (a.worst, b.worst) {
            (Some(x), Some(y)) => Some(if y.exceeds(&x, &self.d) { y } else { x }),
            (x, y) => x.or(y),
        };
        a
    }

    fn ceil_at(&self, n: u64) -> BigInt {
        -self.neg_alpha.floor(n)
    }

    fn deviation(&self, delta_num: &BigInt, sigma: i64, n: u64) -> Deviation {
        let (p, q) = &self.limits[sigma as usize];
        let m = &self.kernel.denom;
        let n2 = BigInt::from(n) * n;
        let mut t = delta_num * &self.limit_den - p * m * &n2;
        let mut u = -(q * m * &n2);
        if int_quad_sign(&t, &u, &self.d).is_lt() {
            t = -t;
            u = -u;
        }
        Deviation { t, u, n }
    }

    fn run(&self, range: Range<u64>) -> ChunkStats {
        let mut stats = self.empty();
        let mut x = self.ceil_at(range.start);
        let mut value = self.kernel.numerator(&x, range.start);
        for n in range {
            let x_next = self.ceil_at(n + 1);
            let next = self.kernel.numerator(&x_next, n + 1);
            let delta_num = &next - &value;
            stats.delta_sum += &delta_num;
            if delta_num.is_negative() {
                stats.last_negative = Some(n);
            }
            if n > 0 {
                let sigma = (&x_next - &x).to_i64().expect("sigma is 0 or 1");
                let raw = RawRatio { num: delta_num.clone(), n };
                record(&mut stats.extremes, sigma, &raw);
                if n >= self.tail_start {
                    record(&mut stats.tail, sigma, &raw);
                }
                let dev = self.deviation(&delta_num, sigma, n);
                if stats.worst.as_ref().is_none_or(|w| dev.exceeds(w, &self.d)) {
                    stats.worst = Some(dev);
                }
                if (n - 1) % self.stride == 0 {
                    stats.rows.push(ScanRow {
                        n,
                        sigma,
                        ceil_alpha_n: x.clone(),
                        delta: Rational::new(delta_num, self.kernel.denom.clone()),
                        delta_over_n2: raw.to_rational(&self.kernel.denom),
                    });
                }
            }
            x = x_next;
            value = next;
        }
        stats
    }
}

/// Numerators of `x` over the denominator `r`, which must be a common multiple.
fn numerators_over(x: &QuadExt, r: &BigInt) -> (BigInt, BigInt) {
    let p = x.a().numer() * (r / x.a().denom());
    let q = x.b().numer() * (r / x.b().denom());
    (p, q)
}

/// Exact scan of `Delta(n)` for `0 <= n <= n_max`, sampling rows at
/// `n = 1, 1 + stride, 1 + 2 stride, ...`.
pub fn empirical_scan(
    model: &ExampleModel,
    n_max: u64,
    stride: u64,
) -> Result<ScanTable, AsymptoticsError> {
    if n_max < 10 {
        return Err(AsymptoticsError::ScanTooShort(n_max));
    }
    if stride == 0 {
        return Err(AsymptoticsError::ZeroStride);
    }
    let radicand = model.alpha.radicand();
    let (l0, l1) = (subsequence_limit(model, 0), subsequence_limit(model, 1));
    let limit_den = [&l0, &l1]
        .iter()
        .fold(BigInt::one(), |acc, l| acc.lcm(l.a().denom()).lcm(l.b().denom()));
    let ctx = ScanContext {
        kernel: LengthKernel::new(model),
        neg_alpha: FloorKernel::new(&-&model.alpha),
        limits: [numerators_over(&l0, &limit_den), numerators_over(&l1, &limit_den)],
        limit_den,
        d: BigInt::from(radicand.value()),
        stride,
        tail_start: n_max / 2,
    };
    let chunks: Vec<Range<u64>> = (0..(n_max + 1).div_ceil(SCAN_CHUNK))
        .map(|c| {
            let lo = c * SCAN_CHUNK;
            lo..(lo + SCAN_CHUNK).min(n_max + 1)
        })
        .collect();
    let stats = chunks
        .into_par_iter()
        .map(|r| ctx.run(r))
        .reduce(|| ctx.empty(), |a, b| ctx.merge(a, b));

    let denom = &ctx.kernel.denom;
    let mut rows = stats.rows;
    rows.sort_by_key(|r| r.n);
    let end = Rational::new(ctx.kernel.numerator(&ctx.ceil_at(n_max + 1), n_max + 1), denom.clone());
    let telescoping_ok = Rational::new(stats.delta_sum, denom.clone()) == end
        && end == model_length(model, n_max + 1);

    let extremes: BTreeMap<i64, RatioExtremes> =
        stats.extremes.iter().map(|(k, v)| (*k, v.finish(denom))).collect();
    let tail_extremes = stats.tail.iter().map(|(k, v)| (*k, v.finish(denom))).collect();

    let sampled_max = rows
        .iter()
        .map(|r| r.delta_over_n2.clone())
        .max()
        .expect("n = 1 is always sampled");
    let bound_constant: BigInt = sampled_max.ceil().to_integer() + BigInt::one();
    let max_ratio = extremes
        .values()
        .map(|e| e.max.clone())
        .max()
        .expect("n_max >= 10 yields samples");
    let bound_holds = Rational::from_integer(bound_constant.clone()) >= max_ratio;

    let worst = stats.worst.expect("n_max >= 10 yields samples");
    let slope_den = denom * &ctx.limit_den * BigInt::from(worst.n);
    let slope_value = QuadExt::new(
        Rational::new(worst.t.clone(), slope_den.clone()),
        Rational::new(worst.u.clone(), slope_den),
        radicand,
    );
    let band = QuadExt::from_rational(model.remainder_slope.clone(), radicand);
    Ok(ScanTable {
        n_max,
        stride,
        rows,
        extremes,
        tail_start: ctx.tail_start,
        tail_extremes,
        telescoping_ok,
        monotone_from: stats.last_negative.map_or(0, |n| n + 1),
        bound_constant,
        bound_holds,
        within_remainder_band: slope_value <= band,
        estimated_remainder_slope: slope_value,
        estimated_remainder_slope_at: worst.n,
    })
}

/// Relative distance allowed between the last scanned `Delta(n)/n^2` of a
/// class and that class's limit.
pub fn scan_tolerance() -> Rational {
    Rational::new(1.into(), 1000.into())
}

/// Relative spread allowed for `Delta(n)/n^2` over the tail of a scan.
pub fn stability_tolerance() -> Rational {
    Rational::new(1.into(), 100.into())
}

/// `|x - l| / |l|`.
pub fn relative_error(x: &Rational, l: &QuadExt) -> QuadExt {
    let diff = (QuadExt::from_rational(x.clone(), l.radicand()) - l) / l;
    if diff.sign() < 0 {
        -diff
    } else {
        diff
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClassSummary {
    pub count: u64,
    pub derived_limit: QuadExt,
    pub printed_limit: Option<QuadExt>,
    #[serde(serialize_with = "serde_util::rational")]
    pub last_ratio: Rational,
    pub last_at: u64,
    pub relative_error_derived: QuadExt,
    pub relative_error_printed: Option<QuadExt>,
    /// `(max - min) / max` of `Delta(n)/n^2` over the tail.
    #[serde(serialize_with = "serde_util::rational")]
    pub tail_spread: Rational,
    pub matches_derived: bool,
    pub matches_printed: Option<bool>,
    pub tail_stable: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ScanSummary {
    pub n_max: u64,
    pub tail_start: u64,
    #[serde(serialize_with = "serde_util::int_keyed")]
    pub classes: BTreeMap<i64, ClassSummary>,
    pub telescoping_ok: bool,
    pub monotone_from: u64,
    #[serde(serialize_with = "serde_util::bigint")]
    pub bound_constant: BigInt,
    pub bound_holds: bool,
    pub estimated_remainder_slope: QuadExt,
    pub estimated_remainder_slope_at: u64,
    pub within_remainder_band: bool,
    pub audit_flags: Vec<String>,
}

/// Compares a scan against the derived (and any printed) class limits.
pub fn scan_summary(model: &ExampleModel, table: &ScanTable) -> ScanSummary {
    let printed = model.printed().map(|_| [printed_sigma1(model), printed_sigma2(model)]);
    let tol = QuadExt::from_rational(scan_tolerance(), model.alpha.radicand());
    let mut flags = Vec::new();
    let mut classes = BTreeMap::new();
    for (&sigma, e) in &table.extremes {
        let derived = subsequence_limit(model, sigma);
        let printed_limit = printed.as_ref().map(|p| p[sigma as usize].clone());
        let err_derived = relative_error(&e.last, &derived);
        let err_printed = printed_limit.as_ref().map(|p| relative_error(&e.last, p));
        let tail_spread = table
            .tail_extremes
            .get(&sigma)
            .map_or_else(Rational::zero, RatioExtremes::relative_spread);
        let matches_derived = err_derived <= tol;
        let matches_printed = err_printed.as_ref().map(|err| *err <= tol);
        let tail_stable = tail_spread < stability_tolerance();
        if !matches_derived {
            flags.push(format!(
                "scan_class{sigma}: Delta(n)/n^2 at n = {} is {} off the derived limit",
                e.last_at,
                dec(&err_derived)
            ));
        }
        if matches_printed == Some(false) {
            flags.push(format!(
                "scan_class{sigma}_printed: Delta(n)/n^2 at n = {} is {} off the printed limit",
                e.last_at,
                dec(err_printed.as_ref().expect("printed error present"))
            ));
        }
        if !tail_stable {
            flags.push(format!("scan_class{sigma}_unstable: tail spread {}", rational_decimal(&tail_spread, 6)));
        }
        classes.insert(
            sigma,
            ClassSummary {
                count: e.count,
                derived_limit: derived,
                printed_limit,
                last_ratio: e.last.clone(),
                last_at: e.last_at,
                relative_error_derived: err_derived,
                relative_error_printed: err_printed,
                tail_spread,
                matches_derived,
                matches_printed,
                tail_stable,
            },
        );
    }
    if !table.telescoping_ok {
        flags.push("scan_telescoping: partial sums differ from L(n_max + 1)".to_string());
    }
    if !table.bound_holds {
        flags.push(format!("scan_bound: Delta(n) exceeds {} n^2", table.bound_constant));
    }
    if !table.within_remainder_band {
        flags.push(format!(
            "scan_remainder: estimated slope {} exceeds the band {}",
            dec(&table.estimated_remainder_slope),
            model.remainder_slope
        ));
    }
    ScanSummary {
        n_max: table.n_max,
        tail_start: table.tail_start,
        classes,
        telescoping_ok: table.telescoping_ok,
        monotone_from: table.monotone_from,
        bound_constant: table.bound_constant.clone(),
        bound_holds: table.bound_holds,
        estimated_remainder_slope: table.estimated_remainder_slope.clone(),
        estimated_remainder_slope_at: table.estimated_remainder_slope_at,
        within_remainder_band: table.within_remainder_band,
        audit_flags: flags,
    }
}
