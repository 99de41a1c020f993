//! Serialization helpers: exact values are written as strings so that
//! reports stay lossless and byte-stable.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use serde::ser::SerializeMap;
use serde::Serializer;

use crate::quadfield::{format_rational, Rational};

pub fn rational<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&format_rational(r))
}

pub fn rationals<S: Serializer>(rs: &[Rational], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(rs.iter().map(format_rational))
}

pub fn bigint<S: Serializer>(n: &BigInt, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&n.to_string())
}

/// Map keyed by small integers, written with string keys in ascending order.
pub fn int_keyed<S, V>(m: &BTreeMap<i64, V>, s: S) -> Result<S::Ok, S::Error>
where
    S: Serializer,
    V: serde::Serialize,
{
    let mut map = s.serialize_map(Some(m.len()))?;
    for (k, v) in m {
        map.serialize_entry(&k.to_string(), v)?;
    }
    map.end()
}
