//! Exact computation and auditing of asymptotic invariants of divisorial
//! filtrations: quadratic-field arithmetic, Beatty sequences, intersection
//! forms, first-difference limits, monomial filtrations and the elliptic
//! curve point sequence behind infinitely many Rees valuations.

pub mod asymptotics;
pub mod beatty;
pub mod intersection;
pub mod monomial;
pub mod picard;
pub mod quadfield;
pub mod serde_util;

pub use beatty::{BeattySequence, PartitionReport};
pub use quadfield::{QuadError, QuadExt, Radicand, Rational};
