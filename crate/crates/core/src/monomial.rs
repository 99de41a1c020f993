//! Monomial ideals in `k[x, y, z]` kept as antichains of exponent vectors,
//! and the filtration `I_n = (z^{n+2}) + z^{n+1} (x, y)^{sigma(n)}`.

use std::collections::BTreeMap;
use std::ops::Bound;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type Exponent = [u64; 3];

/// Exclusive bound on every exponent.
pub const EXPONENT_LIMIT: u64 = 1 << 63;

/// Largest `n` accepted by [`build_in`]; keeps `n + 2` well inside the bound.
pub const MAX_INDEX: u64 = 1 << 40;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MonomialError {
    #[error("exponent {0:?} has an entry >= 2^63")]
    ExponentTooLarge(Exponent),
    #[error("sigma must be a nonempty array of positive integers")]
    EmptySigma,
    #[error("sigma({n}) = 0; values must be positive")]
    NonPositiveSigma { n: u64 },
    #[error("sigma is tabulated for 1..={len}, asked for n = {n}")]
    SigmaOutOfRange { n: u64, len: u64 },
    #[error("sigma({n}) exceeds 2^40")]
    SigmaTooLarge { n: u64 },
    #[error("filtration index must be in 1..=2^40, got {0}")]
    BadIndex(u64),
    #[error("invalid sigma document: {0}")]
    Json(String),
}

fn check(e: Exponent) -> Result<Exponent, MonomialError> {
    if e.iter().any(|&v| v >= EXPONENT_LIMIT) {
        return Err(MonomialError::ExponentTooLarge(e));
    }
    Ok(e)
}

fn divides(a: &Exponent, b: &Exponent) -> bool {
    a[0] <= b[0] && a[1] <= b[1] && a[2] <= b[2]
}

fn add(a: &Exponent, b: &Exponent) -> Result<Exponent, MonomialError> {
    let mut out = [0; 3];
    for i in 0..3 {
        out[i] = a[i].checked_add(b[i]).ok_or(MonomialError::ExponentTooLarge([
            a[0].saturating_add(b[0]),
            a[1].saturating_add(b[1]),
            a[2].saturating_add(b[2]),
        ]))?;
    }
    check(out)
}

/// Pareto front in the `(x, y)` plane: `x` increasing, `y` strictly decreasing.
#[derive(Debug, Default)]
struct Staircase(BTreeMap<u64, u64>);

impl Staircase {
    /// Whether some stored `(x', y')` has `x' <= x` and `y' <= y`.
    fn covers(&self, x: u64, y: u64) -> bool {
        self.0.range(..=x).next_back().is_some_and(|(_, &yy)| yy <= y)
    }

    fn insert(&mut self, x: u64, y: u64) {
        if self.covers(x, y) {
            return;
        }
        let dominated: Vec<u64> = self
            .0
            .range((Bound::Included(x), Bound::Unbounded))
            .take_while(|(_, &yy)| yy >= y)
            .map(|(&xx, _)| xx)
            .collect();
        for xx in dominated {
            self.0.remove(&xx);
        }
        self.0.insert(x, y);
    }
}

/// Answers "is this vector divisible by something already kept?" Kept
/// vectors are bucketed by `z`, each bucket holding an `(x, y)` staircase.
#[derive(Debug, Default)]
struct DivisorIndex {
    by_z: BTreeMap<u64, Staircase>,
}

impl DivisorIndex {
    fn covers(&self, e: &Exponent) -> bool {
        self.by_z.range(..=e[2]).any(|(_, s)| s.covers(e[0], e[1]))
    }

    fn insert(&mut self, e: &Exponent) {
        self.by_z.entry(e[2]).or_default().insert(e[0], e[1]);
    }
}

/// Drops every vector divisible by another one, keeping one copy of
/// duplicates. The result is sorted.
pub fn minimalize<I: IntoIterator<Item = Exponent>>(gens: I) -> Vec<Exponent> {
    let mut v: Vec<Exponent> = gens.into_iter().collect();
    // A proper divisor has strictly smaller total degree, so it is seen first.
    v.sort_unstable_by_key(|e| (e.iter().map(|&c| c as u128).sum::<u128>(), *e));
    v.dedup();
    let mut index = DivisorIndex::default();
    let mut kept = Vec::new();
    for e in v {
        if !index.covers(&e) {
            index.insert(&e);
            kept.push(e);
        }
    }
    kept.sort_unstable();
    kept
}

/// Quadratic reference implementation of [`minimalize`].
pub fn minimalize_naive<I: IntoIterator<Item = Exponent>>(gens: I) -> Vec<Exponent> {
    let mut v: Vec<Exponent> = gens.into_iter().collect();
    v.sort_unstable();
    v.dedup();
    let kept: Vec<Exponent> = v
        .iter()
        .filter(|e| !v.iter().any(|o| o != *e && divides(o, e)))
        .copied()
        .collect();
    kept
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct MonomialIdeal {
    generators: Vec<Exponent>,
}

impl MonomialIdeal {
    pub fn zero() -> Self {
        MonomialIdeal { generators: Vec::new() }
    }

    pub fn unit() -> Self {
        MonomialIdeal { generators: vec![[0, 0, 0]] }
    }

    pub fn principal(e: Exponent) -> Result<Self, MonomialError> {
        Ok(MonomialIdeal { generators: vec![check(e)?] })
    }

    pub fn from_generators<I: IntoIterator<Item = Exponent>>(gens: I) -> Result<Self, MonomialError> {
        let gens: Vec<Exponent> = gens.into_iter().map(check).collect::<Result<_, _>>()?;
        Ok(MonomialIdeal { generators: minimalize(gens) })
    }

    /// `(x, y)^k`, generated by `x^i y^{k-i}`.
    pub fn xy_power(k: u64) -> Result<Self, MonomialError> {
        check([k, k, 0])?;
        Ok(MonomialIdeal { generators: (0..=k).map(|i| [i, k - i, 0]).collect() })
    }

    pub fn generators(&self) -> &[Exponent] {
        &self.generators
    }

    pub fn is_zero(&self) -> bool {
        self.generators.is_empty()
    }

    /// Length of `I / m I`, which for a monomial ideal is its number of
    /// minimal generators.
    pub fn min_gens_count(&self) -> usize {
        self.generators.len()
    }

    pub fn contains_monomial(&self, e: &Exponent) -> bool {
        self.generators.iter().any(|g| divides(g, e))
    }

    /// Whether `other` is contained in `self`.
    pub fn contains(&self, other: &MonomialIdeal) -> bool {
        other.generators.iter().all(|g| self.contains_monomial(g))
    }

    pub fn sum(&self, other: &MonomialIdeal) -> MonomialIdeal {
        MonomialIdeal {
            generators: minimalize(self.generators.iter().chain(&other.generators).copied()),
        }
    }

    pub fn product(&self, other: &MonomialIdeal) -> Result<MonomialIdeal, MonomialError> {
        let mut gens = Vec::with_capacity(self.generators.len() * other.generators.len());
        for a in &self.generators {
            for b in &other.generators {
                gens.push(add(a, b)?);
            }
        }
        Ok(MonomialIdeal { generators: minimalize(gens) })
    }

    pub fn pow(&self, e: u32) -> Result<MonomialIdeal, MonomialError> {
        (0..e).try_fold(MonomialIdeal::unit(), |acc, _| acc.product(self))
    }
}

/// Whether `I J` is contained in `K`.
pub fn product_contained_in(
    i: &MonomialIdeal,
    j: &MonomialIdeal,
    k: &MonomialIdeal,
) -> Result<bool, MonomialError> {
    let mut index = DivisorIndex::default();
    for g in &k.generators {
        index.insert(g);
    }
    for a in &i.generators {
        for b in &j.generators {
            if !index.covers(&add(a, b)?) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// A tabulated `sigma: {1, ..., len} -> Z_{>0}`; `values[n - 1] = sigma(n)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<u64>", into = "Vec<u64>")]
pub struct SigmaFiltration {
    values: Vec<u64>,
}

impl TryFrom<Vec<u64>> for SigmaFiltration {
    type Error = MonomialError;

    fn try_from(values: Vec<u64>) -> Result<Self, Self::Error> {
        SigmaFiltration::new(values)
    }
}

impl From<SigmaFiltration> for Vec<u64> {
    fn from(s: SigmaFiltration) -> Self {
        s.values
    }
}

impl SigmaFiltration {
    pub fn new(values: Vec<u64>) -> Result<Self, MonomialError> {
        if values.is_empty() {
            return Err(MonomialError::EmptySigma);
        }
        if let Some(i) = values.iter().position(|&v| v == 0) {
            return Err(MonomialError::NonPositiveSigma { n: i as u64 + 1 });
        }
        if let Some(i) = values.iter().position(|&v| v > MAX_INDEX) {
            return Err(MonomialError::SigmaTooLarge { n: i as u64 + 1 });
        }
        Ok(SigmaFiltration { values })
    }

    pub fn from_fn(len: u64, f: impl Fn(u64) -> u64) -> Result<Self, MonomialError> {
        Self::new((1..=len).map(f).collect())
    }

    pub fn from_json(text: &str) -> Result<Self, MonomialError> {
        serde_json::from_str(text).map_err(|e| MonomialError::Json(e.to_string()))
    }

    pub fn len(&self) -> u64 {
        self.values.len() as u64
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn sigma(&self, n: u64) -> Result<u64, MonomialError> {
        if n == 0 || n > self.len() {
            return Err(MonomialError::SigmaOutOfRange { n, len: self.len() });
        }
        Ok(self.values[(n - 1) as usize])
    }
}

/// `I_n = (z^{n+2}) + z^{n+1} (x, y)^{sigma(n)}`, assembled from its pieces
/// and minimalized.
pub fn build_in(f: &SigmaFiltration, n: u64) -> Result<MonomialIdeal, MonomialError> {
    if n == 0 || n > MAX_INDEX {
        return Err(MonomialError::BadIndex(n));
    }
    let s = f.sigma(n)?;
    let top = MonomialIdeal::principal([0, 0, n + 2])?;
    let lower = MonomialIdeal::principal([0, 0, n + 1])?.product(&MonomialIdeal::xy_power(s)?)?;
    Ok(top.sum(&lower))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IdealRecord {
    pub n: u64,
    pub gens: Vec<Exponent>,
    pub count: usize,
}

/// Generators of `I_n` for `1 <= n <= n_max`.
pub fn ideal_records(f: &SigmaFiltration, n_max: u64) -> Result<Vec<IdealRecord>, MonomialError> {
    (1..=n_max)
        .into_par_iter()
        .map(|n| {
            let ideal = build_in(f, n)?;
            Ok(IdealRecord { n, count: ideal.min_gens_count(), gens: ideal.generators })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FiltrationCheck {
    pub n_max: u64,
    pub pairs_checked: u64,
    /// `(m, n)` with `I_m I_n` not inside `I_{m+n}`.
    pub counterexamples: Vec<(u64, u64)>,
    /// `n` with `count(I_n) != sigma(n) + 2`.
    pub count_mismatches: Vec<u64>,
}

/// Checks `I_m I_n` inside `I_{m+n}` for `m, n >= 1`, `m + n <= n_max`, and
/// the generator count of every `I_n` up to `n_max`.
pub fn check_filtration(f: &SigmaFiltration, n_max: u64) -> Result<FiltrationCheck, MonomialError> {
    let ideals: Vec<MonomialIdeal> =
        (1..=n_max).into_par_iter().map(|n| build_in(f, n)).collect::<Result<_, _>>()?;
    let at = |n: u64| &ideals[(n - 1) as usize];
    let count_mismatches = (1..=n_max)
        .filter(|&n| at(n).min_gens_count() as u64 != f.values[(n - 1) as usize] + 2)
        .collect();
    let pairs: Vec<(u64, u64)> =
        (1..n_max).flat_map(|m| (1..=n_max - m).map(move |n| (m, n))).collect();
    let verdicts: Vec<((u64, u64), bool)> = pairs
        .par_iter()
        .map(|&(m, n)| Ok(((m, n), product_contained_in(at(m), at(n), at(m + n))?)))
        .collect::<Result<_, MonomialError>>()?;
    let counterexamples = verdicts.iter().filter(|(_, ok)| !ok).map(|(p, _)| *p).collect();
    Ok(FiltrationCheck {
        n_max,
        pairs_checked: pairs.len() as u64,
        counterexamples,
        count_mismatches,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sigma_const(c: u64, len: u64) -> SigmaFiltration {
        SigmaFiltration::from_fn(len, |_| c).unwrap()
    }

    #[test]
    fn minimalize_examples() {
        assert_eq!(minimalize([[1, 0, 0], [2, 0, 0]]), vec![[1, 0, 0]]);
        let anti = vec![[0, 0, 3], [0, 1, 2], [1, 0, 2]];
        assert_eq!(minimalize(anti.clone()), anti);
        let enumerated = [[0, 0, 3], [1, 0, 2], [0, 1, 2], [1, 1, 3], [2, 0, 2], [0, 0, 4]];
        assert_eq!(minimalize(enumerated), anti);
        assert_eq!(minimalize([[3, 3, 3], [3, 3, 3]]), vec![[3, 3, 3]]);
        assert!(minimalize([]).is_empty());
    }

    #[test]
    fn staircase_replaces_dominated_points() {
        let mut s = Staircase::default();
        s.insert(5, 5);
        s.insert(6, 1);
        s.insert(2, 2);
        assert_eq!(s.0.into_iter().collect::<Vec<_>>(), vec![(2, 2), (6, 1)]);
    }

    #[test]
    fn build_in_examples() {
        let one = sigma_const(1, 100);
        assert_eq!(build_in(&one, 1).unwrap().generators(), &[[0, 0, 3], [0, 1, 2], [1, 0, 2]]);
        let two = sigma_const(2, 1);
        let i = build_in(&two, 1).unwrap();
        assert_eq!(i.generators(), &[[0, 0, 3], [0, 2, 2], [1, 1, 2], [2, 0, 2]]);
        for n in 1..=100 {
            assert_eq!(build_in(&one, n).unwrap().min_gens_count(), 3);
        }
        let squares = SigmaFiltration::from_fn(7, |n| n * n).unwrap();
        assert_eq!(build_in(&squares, 7).unwrap().min_gens_count(), 51);
        assert_eq!(build_in(&one, 0), Err(MonomialError::BadIndex(0)));
        assert!(matches!(build_in(&one, 101), Err(MonomialError::SigmaOutOfRange { .. })));
    }

    #[test]
    fn products_and_containment() {
        let z2 = MonomialIdeal::principal([0, 0, 2]).unwrap();
        let z3 = MonomialIdeal::principal([0, 0, 3]).unwrap();
        let z5 = MonomialIdeal::principal([0, 0, 5]).unwrap();
        assert!(product_contained_in(&z2, &z3, &z5).unwrap());
        assert!(!product_contained_in(&z2, &z2, &z5).unwrap());
        let i = MonomialIdeal::xy_power(3).unwrap();
        assert!(product_contained_in(&i, &MonomialIdeal::unit(), &i).unwrap());
        assert_eq!(MonomialIdeal::zero().min_gens_count(), 0);
        let m = MonomialIdeal::xy_power(1).unwrap();
        assert_eq!(m.pow(6).unwrap(), MonomialIdeal::xy_power(6).unwrap());
        assert!(MonomialIdeal::xy_power(2).unwrap().contains(&MonomialIdeal::xy_power(5).unwrap()));
    }

    #[test]
    fn overflow_is_reported() {
        let big = MonomialIdeal::principal([EXPONENT_LIMIT - 1, 0, 0]).unwrap();
        assert!(big.product(&big).is_err());
        assert!(MonomialIdeal::principal([EXPONENT_LIMIT, 0, 0]).is_err());
    }

    #[test]
    fn identity_filtration_is_graded() {
        let f = SigmaFiltration::from_fn(60, |n| n).unwrap();
        let r = check_filtration(&f, 60).unwrap();
        assert!(r.counterexamples.is_empty());
        assert!(r.count_mismatches.is_empty());
        assert_eq!(r.pairs_checked, 59 * 60 / 2);
    }

    #[test]
    fn sigma_json() {
        let f = SigmaFiltration::from_json("[1, 4, 9]").unwrap();
        assert_eq!(f.sigma(2).unwrap(), 4);
        assert_eq!(serde_json::to_string(&f).unwrap(), "[1,4,9]");
        assert!(SigmaFiltration::from_json("[]").is_err());
        assert!(SigmaFiltration::from_json("[1, 0]").is_err());
        assert!(SigmaFiltration::from_json("[1, -2]").is_err());
        assert!(SigmaFiltration::from_json("{\"a\": 1}").is_err());
    }
}
