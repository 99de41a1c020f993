//! Symmetric trilinear intersection forms on a named divisor lattice and
//! symbolic expansion of triple products of divisors whose coefficients
//! are linear in `x` and `y`.

pub mod poly;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::quadfield::{format_rational, parse_rational, QuadError, Rational};
pub use poly::BivariatePolynomial;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IntersectionError {
    #[error("unknown divisor symbol {0:?}")]
    UnknownSymbol(String),
    #[error("duplicate generator {0:?}")]
    DuplicateGenerator(String),
    #[error("invalid generator name {0:?}")]
    InvalidName(String),
    #[error("triple {0:?} listed more than once")]
    DuplicateTriple([String; 3]),
    #[error("intersection number of {0:?} is not in the table")]
    MissingTriple([String; 3]),
    #[error("triple entry has {0} divisors, expected 3")]
    WrongArity(usize),
    #[error("coefficient of {0:?} is not linear in x, y")]
    NonLinearCoefficient(String),
    #[error(transparent)]
    Value(#[from] QuadError),
    #[error("malformed intersection table: {0}")]
    Json(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DivisorSymbol(String);

impl DivisorSymbol {
    pub fn new(name: &str) -> Result<Self, IntersectionError> {
        let ok = !name.is_empty()
            && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
        if ok {
            Ok(DivisorSymbol(name.to_string()))
        } else {
            Err(IntersectionError::InvalidName(name.to_string()))
        }
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for DivisorSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// A symmetric trilinear form, stored on sorted index triples.
///
/// Triples absent from the table are not assumed to be zero: expanding a
/// product that needs one is an error. The canonical class in particular
/// only carries rows with exactly one `K` factor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntersectionForm {
    generators: Vec<DivisorSymbol>,
    table: BTreeMap<[usize; 3], Rational>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FormDoc {
    generators: Vec<String>,
    triples: Vec<TripleDoc>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TripleDoc {
    d: Vec<String>,
    v: String,
}

impl IntersectionForm {
    pub fn new(generators: &[&str]) -> Result<Self, IntersectionError> {
        let mut seen = BTreeSet::new();
        let mut gens = Vec::with_capacity(generators.len());
        for g in generators {
            let sym = DivisorSymbol::new(g)?;
            if !seen.insert(sym.clone()) {
                return Err(IntersectionError::DuplicateGenerator(g.to_string()));
            }
            gens.push(sym);
        }
        Ok(IntersectionForm { generators: gens, table: BTreeMap::new() })
    }

    pub fn generators(&self) -> &[DivisorSymbol] {
        &self.generators
    }

    fn index(&self, name: &str) -> Result<usize, IntersectionError> {
        self.generators
            .iter()
            .position(|g| g.0 == name)
            .ok_or_else(|| IntersectionError::UnknownSymbol(name.to_string()))
    }

    fn key(&self, names: [&str; 3]) -> Result<[usize; 3], IntersectionError> {
        let mut k = [self.index(names[0])?, self.index(names[1])?, self.index(names[2])?];
        k.sort_unstable();
        Ok(k)
    }

    fn names(&self, key: [usize; 3]) -> [String; 3] {
        key.map(|i| self.generators[i].0.clone())
    }

    /// Sets the intersection number of three generators (in any order).
    pub fn set(&mut self, names: [&str; 3], value: Rational) -> Result<(), IntersectionError> {
        let k = self.key(names)?;
        if self.table.insert(k, value).is_some() {
            return Err(IntersectionError::DuplicateTriple(self.names(k)));
        }
        Ok(())
    }

    pub fn value(&self, names: [&str; 3]) -> Result<&Rational, IntersectionError> {
        let k = self.key(names)?;
        self.table.get(&k).ok_or_else(|| IntersectionError::MissingTriple(self.names(k)))
    }

    pub fn from_json(text: &str) -> Result<Self, IntersectionError> {
        let doc: FormDoc =
            serde_json::from_str(text).map_err(|e| IntersectionError::Json(e.to_string()))?;
        let gens: Vec<&str> = doc.generators.iter().map(String::as_str).collect();
        let mut form = IntersectionForm::new(&gens)?;
        for t in &doc.triples {
            let names: [&str; 3] = match t.d.as_slice() {
                [a, b, c] => [a, b, c],
                other => return Err(IntersectionError::WrongArity(other.len())),
            };
            form.set(names, parse_rational(&t.v)?)?;
        }
        Ok(form)
    }

    /// JSON document with triples in sorted-key order.
    pub fn to_json(&self) -> String {
        let doc = FormDoc {
            generators: self.generators.iter().map(|g| g.0.clone()).collect(),
            triples: self
                .table
                .iter()
                .map(|(k, v)| TripleDoc { d: self.names(*k).to_vec(), v: format_rational(v) })
                .collect(),
        };
        serde_json::to_string_pretty(&doc).expect("form serializes")
    }

    /// Full multilinear expansion of `(A . B . C)`.
    pub fn triple_product(
        &self,
        a: &DivisorExpr,
        b: &DivisorExpr,
        c: &DivisorExpr,
    ) -> Result<BivariatePolynomial, IntersectionError> {
        for e in [a, b, c] {
            for sym in e.coefficients.keys() {
                self.index(&sym.0)?;
            }
        }
        let mut out = BivariatePolynomial::zero();
        for (sa, pa) in &a.coefficients {
            for (sb, pb) in &b.coefficients {
                let pab = pa * pb;
                for (sc, pc) in &c.coefficients {
                    let v = self.value([&sa.0, &sb.0, &sc.0])?;
                    out = out + (&pab * pc).scale(v);
                }
            }
        }
        Ok(out)
    }
}

/// A divisor `sum_i c_i(x, y) G_i` with coefficients linear in `x`, `y`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DivisorExpr {
    coefficients: BTreeMap<DivisorSymbol, BivariatePolynomial>,
}

impl DivisorExpr {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds `coefficient * name`.
    pub fn with(mut self, name: &str, coefficient: BivariatePolynomial) -> Result<Self, IntersectionError> {
        if coefficient.total_degree().is_some_and(|d| d > 1) {
            return Err(IntersectionError::NonLinearCoefficient(name.to_string()));
        }
        let sym = DivisorSymbol::new(name)?;
        let slot = self.coefficients.entry(sym.clone()).or_default();
        *slot = &*slot + &coefficient;
        if slot.is_zero() {
            self.coefficients.remove(&sym);
        }
        Ok(self)
    }

    /// The generator itself with coefficient one.
    pub fn symbol(name: &str) -> Result<Self, IntersectionError> {
        Self::new().with(name, BivariatePolynomial::constant(num_traits::One::one()))
    }

    pub fn coefficients(&self) -> impl Iterator<Item = (&DivisorSymbol, &BivariatePolynomial)> {
        self.coefficients.iter()
    }

    pub fn add(&self, other: &DivisorExpr) -> DivisorExpr {
        let mut out = self.clone();
        for (s, p) in &other.coefficients {
            out = out.with(&s.0, p.clone()).expect("sum of linear coefficients is linear");
        }
        out
    }
}

/// Names used for the resolution's exceptional divisors and canonical class.
pub const SURFACE: &str = "S";
pub const FIBER_DIVISOR: &str = "F";
pub const CANONICAL: &str = "K";

/// Intersection numbers of the two exceptional divisors together with the
/// rows pairing two of them against the canonical class. The `K` rows are
/// read off the assembled quadratic `-792x^2 + 564xy - 175y^2` of
/// `(D_n^2 . K)`, whose middle coefficient is twice `(S . F . K)`.
pub fn example_form() -> IntersectionForm {
    let mut f = IntersectionForm::new(&[SURFACE, FIBER_DIVISOR, CANONICAL]).expect("static names");
    let rows: [([&str; 3], i64); 7] = [
        ([SURFACE, SURFACE, SURFACE], 468),
        ([SURFACE, SURFACE, FIBER_DIVISOR], -162),
        ([SURFACE, FIBER_DIVISOR, FIBER_DIVISOR], 54),
        ([FIBER_DIVISOR, FIBER_DIVISOR, FIBER_DIVISOR], 54),
        ([SURFACE, SURFACE, CANONICAL], -792),
        ([SURFACE, FIBER_DIVISOR, CANONICAL], 282),
        ([FIBER_DIVISOR, FIBER_DIVISOR, CANONICAL], -175),
    ];
    for (names, v) in rows {
        f.set(names, Rational::from_integer(v.into())).expect("distinct rows");
    }
    f
}

/// `D_n = x S + y F`.
pub fn example_dn() -> DivisorExpr {
    DivisorExpr::new()
        .with(SURFACE, BivariatePolynomial::x())
        .and_then(|e| e.with(FIBER_DIVISOR, BivariatePolynomial::y()))
        .expect("static names")
}

pub fn canonical_class() -> DivisorExpr {
    DivisorExpr::symbol(CANONICAL).expect("static name")
}
