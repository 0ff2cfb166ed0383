use std::collections::HashMap;

use super::distribution::DiscreteDistribution;
use super::MarkovChain;
use crate::{Error, Result};

/// Exact, canonical text form of a discrete vector, used as a map key.
/// Values use Rust's shortest round-trip decimal rendering; `-0` becomes `0`.
pub fn canonical_key(v: &[f64]) -> String {
    let mut out = String::with_capacity(v.len() * 2);
    for (i, x) in v.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        let x = if *x == 0.0 { 0.0 } else { *x };
        out.push_str(&x.to_string());
    }
    out
}

/// Observed outcomes for one input state.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionalEntry {
    pub key: String,
    pub input: Vec<f64>,
    pub outcome_keys: Vec<String>,
    pub outcomes: Vec<Vec<f64>>,
    pub counts: Vec<u64>,
    pub distribution: DiscreteDistribution,
}

impl ConditionalEntry {
    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn probability_of(&self, outcome: &[f64]) -> f64 {
        let key = canonical_key(outcome);
        self.outcome_keys
            .iter()
            .position(|k| *k == key)
            .map_or(0.0, |i| self.distribution.probs()[i])
    }
}

/// `(input, outcomes, counts)` for one input state.
pub type CountRow = (Vec<f64>, Vec<Vec<f64>>, Vec<u64>);

/// Relative-frequency estimate of `p(y | x)` for every observed input `x`.
/// Inputs and, within each input, outcomes keep first-appearance order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct EmpiricalConditional {
    entries: Vec<ConditionalEntry>,
    index: HashMap<String, usize>,
}

impl EmpiricalConditional {
    pub fn entries(&self) -> &[ConditionalEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, input: &[f64]) -> Option<&ConditionalEntry> {
        self.index.get(&canonical_key(input)).map(|&i| &self.entries[i])
    }

    pub fn total_observations(&self) -> u64 {
        self.entries.iter().map(ConditionalEntry::total).sum()
    }

    /// Builds the table from explicit `(input, outcomes, counts)` rows.
    pub fn from_counts(rows: Vec<CountRow>) -> Result<Self> {
        let mut table = EmpiricalConditional::default();
        for (input, outcomes, counts) in rows {
            if outcomes.len() != counts.len() || outcomes.is_empty() {
                return Err(Error::input("each input needs matching outcomes and counts"));
            }
            if counts.contains(&0) {
                return Err(Error::input("outcome counts must be positive"));
            }
            let key = canonical_key(&input);
            if table.index.contains_key(&key) {
                return Err(Error::input(format!("duplicate input {key}")));
            }
            let outcome_keys: Vec<String> = outcomes.iter().map(|o| canonical_key(o)).collect();
            let mut seen = outcome_keys.clone();
            seen.sort();
            seen.dedup();
            if seen.len() != outcome_keys.len() {
                return Err(Error::input(format!("duplicate outcome for input {key}")));
            }
            let distribution = DiscreteDistribution::from_counts(&counts)?;
            table.index.insert(key.clone(), table.entries.len());
            table.entries.push(ConditionalEntry {
                key,
                input,
                outcome_keys,
                outcomes,
                counts,
                distribution,
            });
        }
        Ok(table)
    }

    /// Exact table for a chain: input `one_hot(j)`, outcomes `one_hot(i)` for
    /// every `i` with `T[i][j] > 0`. Probabilities are turned into integer
    /// counts over the smallest common denominator up to 10^6.
    pub fn from_chain(chain: &MarkovChain) -> Result<Self> {
        let n = chain.len();
        let mut rows = Vec::with_capacity(n);
        for j in 0..n {
            let column = chain.column(j);
            let counts = integer_counts(&column).ok_or_else(|| {
                Error::input(format!("column {j} has no exact integer ratio representation"))
            })?;
            let (outcomes, counts): (Vec<_>, Vec<_>) = counts
                .into_iter()
                .enumerate()
                .filter(|(_, c)| *c > 0)
                .map(|(i, c)| (crate::nn::one_hot(n, i), c))
                .unzip();
            rows.push((crate::nn::one_hot(n, j), outcomes, counts));
        }
        Self::from_counts(rows)
    }
}

fn integer_counts(probs: &[f64]) -> Option<Vec<u64>> {
    (1..=1_000_000u64).find_map(|d| {
        let scaled: Vec<f64> = probs.iter().map(|p| p * d as f64).collect();
        scaled
            .iter()
            .all(|s| (s - s.round()).abs() < 1e-9 * d as f64)
            .then(|| scaled.iter().map(|s| s.round() as u64).collect())
    })
}

/// `p(y_k | x) = #{(x, y_k)} / #{(x, ·)}` for every distinct input `x`.
pub fn estimate_empirical<I, V>(pairs: I) -> Result<EmpiricalConditional>
where
    I: IntoIterator<Item = (V, V)>,
    V: AsRef<[f64]>,
{
    struct Acc {
        input: Vec<f64>,
        outcome_keys: Vec<String>,
        outcomes: Vec<Vec<f64>>,
        counts: Vec<u64>,
    }
    let mut order: Vec<Acc> = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    for (x, y) in pairs {
        let (x, y) = (x.as_ref(), y.as_ref());
        let key = canonical_key(x);
        let slot = *index.entry(key).or_insert_with(|| {
            order.push(Acc {
                input: x.to_vec(),
                outcome_keys: Vec::new(),
                outcomes: Vec::new(),
                counts: Vec::new(),
            });
            order.len() - 1
        });
        let acc = &mut order[slot];
        let ykey = canonical_key(y);
        match acc.outcome_keys.iter().position(|k| *k == ykey) {
            Some(i) => acc.counts[i] += 1,
            None => {
                acc.outcome_keys.push(ykey);
                acc.outcomes.push(y.to_vec());
                acc.counts.push(1);
            }
        }
    }
    if order.is_empty() {
        return Err(Error::input("no pairs to estimate from"));
    }
    EmpiricalConditional::from_counts(
        order.into_iter().map(|a| (a.input, a.outcomes, a.counts)).collect(),
    )
}
