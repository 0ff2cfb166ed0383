use serde::{Deserialize, Serialize};

use super::distribution::{cumulative, sample_index, DiscreteDistribution};
use crate::rng;
use crate::{Error, Result};

pub const CHAIN_FORMAT: &str = "mcnn-chain-v1";

/// States plus a column-stochastic transition matrix: `T[i][j] = p(i | j)`,
/// so column `j` is the outgoing distribution of state `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct MarkovChain {
    labels: Vec<String>,
    transition: Vec<Vec<f64>>,
}

impl MarkovChain {
    pub fn new(labels: Vec<String>, transition: Vec<Vec<f64>>) -> Result<Self> {
        Self::with_tolerance(labels, transition, super::SUM_TOLERANCE)
    }

    fn with_tolerance(labels: Vec<String>, transition: Vec<Vec<f64>>, tol: f64) -> Result<Self> {
        let n = labels.len();
        if n == 0 {
            return Err(Error::input("a chain needs at least one state"));
        }
        if transition.len() != n || transition.iter().any(|row| row.len() != n) {
            return Err(Error::shape(format!("transition matrix must be {n}x{n}")));
        }
        if transition.iter().flatten().any(|p| !(0.0..=1.0).contains(p)) {
            return Err(Error::input("transition entries must lie in [0, 1]"));
        }
        for j in 0..n {
            let sum: f64 = transition.iter().map(|row| row[j]).sum();
            if (sum - 1.0).abs() > tol {
                return Err(Error::input(format!("column {j} sums to {sum}, not 1")));
            }
        }
        Ok(Self { labels, transition })
    }

    /// Chain with labels `"1".."n"`.
    pub fn numbered(transition: Vec<Vec<f64>>) -> Result<Self> {
        let labels = (1..=transition.len()).map(|i| i.to_string()).collect();
        Self::new(labels, transition)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn transition(&self) -> &[Vec<f64>] {
        &self.transition
    }

    /// Outgoing distribution of state `j`.
    pub fn column(&self, j: usize) -> Vec<f64> {
        self.transition.iter().map(|row| row[j]).collect()
    }

    pub fn column_distribution(&self, j: usize) -> Result<DiscreteDistribution> {
        if j >= self.len() {
            return Err(Error::input(format!("state {j} out of range")));
        }
        DiscreteDistribution::new(self.column(j))
    }
}

/// One inverse-CDF step from `state` driven by `r`.
pub fn chain_step(chain: &MarkovChain, state: usize, r: f64) -> Result<usize> {
    let dist = chain.column_distribution(state)?;
    sample_index(&cumulative(&dist), r)
}

/// `n_steps + 1` states starting at `start`, one fresh uniform draw per step.
pub fn simulate_chain(chain: &MarkovChain, start: usize, n_steps: usize, seed: u64) -> Result<Vec<usize>> {
    if start >= chain.len() {
        return Err(Error::input(format!("start state {start} out of range")));
    }
    let intervals: Vec<_> = (0..chain.len())
        .map(|j| chain.column_distribution(j).map(|d| cumulative(&d)))
        .collect::<Result<_>>()?;
    let mut rng = rng::seeded(seed);
    let mut states = Vec::with_capacity(n_steps + 1);
    states.push(start);
    let mut current = start;
    for _ in 0..n_steps {
        current = sample_index(&intervals[current], rng::unit(&mut rng))?;
        states.push(current);
    }
    Ok(states)
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ChainFile {
    format: String,
    states: Vec<String>,
    transition: Vec<Vec<f64>>,
}

/// JSON chain file; `transition` is stored row-major with `T[i][j] = p(i|j)`.
pub fn save_chain(chain: &MarkovChain) -> Vec<u8> {
    let file = ChainFile {
        format: CHAIN_FORMAT.to_string(),
        states: chain.labels.clone(),
        transition: chain.transition.clone(),
    };
    serde_json::to_vec_pretty(&file).expect("chain serializes")
}

pub fn load_chain(bytes: &[u8]) -> Result<MarkovChain> {
    let file: ChainFile =
        serde_json::from_slice(bytes).map_err(|e| Error::parse(format!("chain file: {e}")))?;
    if file.format != CHAIN_FORMAT {
        return Err(Error::parse(format!("unsupported chain format {:?}", file.format)));
    }
    MarkovChain::with_tolerance(file.states, file.transition, 1e-6)
        .map_err(|e| Error::parse(e.to_string()))
}
