//! Markov chains and the random-value augmentation that lets a
//! deterministic network sample them.
//!
//! The pipeline is: observed `(x, y)` pairs → [`estimate_empirical`] →
//! per-input [`cumulative`] intervals → [`generate_pairs`], which draws
//! `r ~ U[0, 1)` and labels `[r | x]` with the outcome whose interval holds
//! `r`. A network fit to those pairs acts as an `r`-controlled switch.

mod chain;
mod distribution;
mod empirical;
mod pairs;

pub use chain::{chain_step, load_chain, save_chain, simulate_chain, MarkovChain, CHAIN_FORMAT};
pub use distribution::{cumulative, sample_index, CumulativeIntervals, DiscreteDistribution};
pub use empirical::{canonical_key, estimate_empirical, ConditionalEntry, CountRow, EmpiricalConditional};
pub use pairs::{augment, generate_pairs, generate_pairs_with, pairs_to_dataset, AugmentedPair};

/// Sums within this distance of 1 count as normalized.
pub const SUM_TOLERANCE: f64 = 1e-9;
