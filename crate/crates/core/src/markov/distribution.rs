use super::SUM_TOLERANCE;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteDistribution {
    probs: Vec<f64>,
}

impl DiscreteDistribution {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::input("a distribution needs at least one outcome"));
        }
        if probs.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return Err(Error::input("probabilities must be finite and non-negative"));
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > SUM_TOLERANCE {
            return Err(Error::input(format!("probabilities sum to {sum}, not 1")));
        }
        Ok(Self { probs })
    }

    /// Normalizes non-negative counts.
    pub fn from_counts(counts: &[u64]) -> Result<Self> {
        let total: u64 = counts.iter().sum();
        if total == 0 {
            return Err(Error::input("counts sum to zero"));
        }
        Self::new(counts.iter().map(|&c| c as f64 / total as f64).collect())
    }

    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::input("a distribution needs at least one outcome"));
        }
        Self::new(vec![1.0 / n as f64; n])
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    /// L1 distance between two distributions over the same outcomes.
    pub fn l1_distance(&self, other: &DiscreteDistribution) -> Result<f64> {
        if self.len() != other.len() {
            return Err(Error::shape("distributions have different supports"));
        }
        Ok(self.probs.iter().zip(&other.probs).map(|(a, b)| (a - b).abs()).sum())
    }
}

/// Boundaries `b_0 = 0 <= b_1 <= ... <= b_c = 1`; outcome `k` owns
/// `[b_k, b_{k+1})` (0-based).
#[derive(Debug, Clone, PartialEq)]
pub struct CumulativeIntervals {
    boundaries: Vec<f64>,
}

impl CumulativeIntervals {
    pub fn boundaries(&self) -> &[f64] {
        &self.boundaries
    }

    pub fn outcomes(&self) -> usize {
        self.boundaries.len() - 1
    }

    /// Half-open interval owned by `outcome`.
    pub fn interval(&self, outcome: usize) -> (f64, f64) {
        (self.boundaries[outcome], self.boundaries[outcome + 1])
    }
}

pub fn cumulative(dist: &DiscreteDistribution) -> CumulativeIntervals {
    let mut boundaries = Vec::with_capacity(dist.len() + 1);
    boundaries.push(0.0);
    let mut acc = 0.0;
    for p in dist.probs() {
        acc += p;
        boundaries.push(acc.min(1.0));
    }
    // absorb summation drift
    *boundaries.last_mut().unwrap() = 1.0;
    CumulativeIntervals { boundaries }
}

/// Inverse-CDF lookup: the outcome `k` with `b_k <= r < b_{k+1}`. `r = 1`
/// maps to the last outcome with positive mass. Zero-mass outcomes own an
/// empty interval and are never returned.
pub fn sample_index(intervals: &CumulativeIntervals, r: f64) -> Result<usize> {
    if !(0.0..=1.0).contains(&r) {
        return Err(Error::input(format!("r = {r} lies outside [0, 1]")));
    }
    let b = &intervals.boundaries;
    let c = intervals.outcomes();
    if r >= 1.0 {
        return Ok((0..c).rev().find(|&k| b[k + 1] > b[k]).unwrap_or(c - 1));
    }
    // first boundary strictly above r, minus one
    let above = b.partition_point(|&v| v <= r);
    Ok(above - 1)
}
