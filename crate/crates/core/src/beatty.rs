//! Beatty sequences `sigma(n) = floor(alpha (n+1)) - floor(alpha n)` for
//! positive quadratic irrationals, with exact partition and
//! equidistribution counts.

use std::ops::Range;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::quadfield::{FloorKernel, QuadExt, Rational};
use crate::serde_util;

/// Chunk size for parallel scans.
const SCAN_CHUNK: u64 = 1 << 14;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BeattyError {
    #[error("alpha must be irrational, got {0}")]
    RationalAlpha(String),
    #[error("alpha must be positive, got {0}")]
    NonPositiveAlpha(String),
    #[error("binary labeling needs 0 < alpha < 1, got {0}")]
    AlphaNotBelowOne(String),
    #[error("n_max must be positive")]
    EmptyRange,
    #[error("histogram needs at least 2 bins, got {0}")]
    TooFewBins(u64),
}

#[derive(Debug, Clone)]
pub struct BeattySequence {
    alpha: QuadExt,
    kernel: FloorKernel,
    floor_alpha: BigInt,
}

/// Counts of the two values of `sigma` over `1..=n_max`.
///
/// `sigma1` counts `n` with `sigma(n) = floor(alpha)`, `sigma2` those with
/// `sigma(n) = ceil(alpha)`. For `alpha` in `(0, 1)` these are the sets
/// where `sigma` is 0 and 1.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PartitionReport {
    pub n_max: u64,
    #[serde(serialize_with = "serde_util::bigint")]
    pub floor_alpha: BigInt,
    pub sigma1_count: u64,
    pub sigma2_count: u64,
    #[serde(serialize_with = "serde_util::rational")]
    pub sigma2_density: Rational,
    pub histogram: Vec<u64>,
}

/// Result of the bounded-gap check for both values of `sigma`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WindowReport {
    pub window: u64,
    pub n_max: u64,
    /// First window start `n` missing one of the two values, if any.
    pub first_violation: Option<u64>,
}

#[derive(Debug, Clone, Default)]
struct Tally {
    ones: u64,
    total: u64,
    histogram: Vec<u64>,
}

impl Tally {
    fn merge(mut self, other: Tally) -> Tally {
        self.ones += other.ones;
        self.total += other.total;
        if self.histogram.is_empty() {
            self.histogram = other.histogram;
        } else {
            for (a, b) in self.histogram.iter_mut().zip(other.histogram) {
                *a += b;
            }
        }
        self
    }
}

impl BeattySequence {
    pub fn new(alpha: QuadExt) -> Result<Self, BeattyError> {
        if alpha.is_rational() {
            return Err(BeattyError::RationalAlpha(alpha.to_string()));
        }
        if alpha.sign() <= 0 {
            return Err(BeattyError::NonPositiveAlpha(alpha.to_string()));
        }
        let kernel = FloorKernel::new(&alpha);
        let floor_alpha = kernel.floor(1);
        Ok(BeattySequence { alpha, kernel, floor_alpha })
    }

    pub fn alpha(&self) -> &QuadExt {
        &self.alpha
    }

    pub fn floor_alpha(&self) -> &BigInt {
        &self.floor_alpha
    }

    /// `floor(alpha n)`.
    pub fn floor_at(&self, n: u64) -> BigInt {
        self.kernel.floor(n)
    }

    /// `ceil(alpha n)`; for `n >= 1` this is `floor(alpha n) + 1`.
    pub fn ceil_at(&self, n: u64) -> BigInt {
        if n == 0 {
            BigInt::zero()
        } else {
            self.floor_at(n) + 1
        }
    }

    pub fn sigma(&self, n: u64) -> BigInt {
        self.floor_at(n + 1) - self.floor_at(n)
    }

    /// `true` when `sigma(n) = ceil(alpha)`.
    pub fn in_sigma2(&self, n: u64) -> bool {
        self.sigma(n) != self.floor_alpha
    }

    /// Fractional-part bin of `alpha n`, decided exactly as
    /// `floor(bins alpha n) - bins floor(alpha n)`.
    pub fn bin_of(&self, n: u64, bins: u64) -> u64 {
        let scaled = match n.checked_mul(bins) {
            Some(m) => self.kernel.floor(m),
            None => self.kernel.floor_big(&(BigInt::from(n) * bins)),
        };
        let bin = scaled - self.floor_at(n) * bins;
        bin.to_u64().expect("bin index lies in 0..bins")
    }

    fn tally(&self, range: Range<u64>, bins: u64) -> Tally {
        let mut tally = Tally { histogram: vec![0; bins as usize], ..Tally::default() };
        let mut prev = self.floor_at(range.start);
        for n in range {
            let next = self.floor_at(n + 1);
            if &next - &prev != self.floor_alpha {
                tally.ones += 1;
            }
            tally.total += 1;
            if bins > 0 {
                tally.histogram[self.bin_of(n, bins) as usize] += 1;
            }
            prev = next;
        }
        tally
    }

    fn scan(&self, n_max: u64, bins: u64) -> Result<PartitionReport, BeattyError> {
        if n_max == 0 {
            return Err(BeattyError::EmptyRange);
        }
        let chunks: Vec<Range<u64>> = (0..n_max.div_ceil(SCAN_CHUNK))
            .map(|c| {
                let lo = 1 + c * SCAN_CHUNK;
                lo..(lo + SCAN_CHUNK).min(n_max + 1)
            })
            .collect();
        let tally = chunks
            .into_par_iter()
            .map(|r| self.tally(r, bins))
            .reduce(Tally::default, Tally::merge);
        Ok(PartitionReport {
            n_max,
            floor_alpha: self.floor_alpha.clone(),
            sigma1_count: tally.total - tally.ones,
            sigma2_count: tally.ones,
            sigma2_density: Rational::new(tally.ones.into(), n_max.into()),
            histogram: tally.histogram,
        })
    }

    /// Counts of both values of `sigma` for any positive irrational `alpha`.
    pub fn value_counts(&self, n_max: u64) -> Result<PartitionReport, BeattyError> {
        self.scan(n_max, 0)
    }

    /// The `Sigma_1`/`Sigma_2` partition of `1..=n_max` (sigma = 0 / 1).
    pub fn partition(&self, n_max: u64) -> Result<PartitionReport, BeattyError> {
        if !self.floor_alpha.is_zero() {
            return Err(BeattyError::AlphaNotBelowOne(self.alpha.to_string()));
        }
        self.scan(n_max, 0)
    }

    pub fn equidistribution_histogram(
        &self,
        n_max: u64,
        bins: u64,
    ) -> Result<PartitionReport, BeattyError> {
        if bins < 2 {
            return Err(BeattyError::TooFewBins(bins));
        }
        self.scan(n_max, bins)
    }

    /// `ceil(2 / min({alpha}, 1 - {alpha}))`.
    pub fn window_length(&self) -> u64 {
        let frac = self.alpha.fract();
        let other = QuadExt::one(frac.radicand()) - &frac;
        let m = if frac < other { frac } else { other };
        let two = QuadExt::from_integer(2, m.radicand());
        (two / m).ceil().to_u64().expect("window fits in u64")
    }

    /// Checks that every window `[n, n + window)` inside `1..=n_max`
    /// contains both values of `sigma`.
    pub fn check_windows(&self, n_max: u64) -> WindowReport {
        let window = self.window_length();
        let mut last_low: Option<u64> = None;
        let mut last_high: Option<u64> = None;
        let mut first_violation = None;
        let mut prev = self.floor_at(1);
        for n in 1..=n_max {
            let next = self.floor_at(n + 1);
            if &next - &prev == self.floor_alpha {
                last_low = Some(n);
            } else {
                last_high = Some(n);
            }
            prev = next;
            if n >= window {
                let start = n + 1 - window;
                let seen = |v: Option<u64>| v.is_some_and(|i| i >= start);
                if !(seen(last_low) && seen(last_high)) {
                    first_violation = Some(start);
                    break;
                }
            }
        }
        WindowReport { window, n_max, first_violation }
    }

    /// Checks `sum_{n=1}^{N} sigma(n) = floor(alpha (N+1)) - floor(alpha)`
    /// by accumulating the terms one at a time.
    pub fn telescoping_holds(&self, n_big: u64) -> bool {
        let mut sum = BigInt::zero();
        for n in 1..=n_big {
            sum += self.sigma(n);
        }
        sum == self.floor_at(n_big + 1) - &self.floor_alpha
    }
}

/// Whether `sigma` only takes the values `floor(alpha)` and `ceil(alpha)`
/// on `1..=n_max`.
pub fn two_values_hold(seq: &BeattySequence, n_max: u64) -> bool {
    let lo = seq.floor_alpha().clone();
    let hi = &lo + BigInt::one();
    (1..=n_max).into_par_iter().all(|n| {
        let s = seq.sigma(n);
        s == lo || s == hi
    })
}
