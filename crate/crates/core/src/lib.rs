//! Markov chain neural networks.
//!
//! A feed-forward network is a deterministic function. Prepending a uniform
//! random value `r` to its input, and training on pairs where `r` selects an
//! outcome through the cumulative intervals of an empirical conditional
//! distribution, turns the same network into a sampler: over `r`, decoded
//! outputs follow the conditional distribution seen in the data.
//!
//! - [`nn`]: dense networks, backpropagation, mini-batch SGD, model files.
//! - [`markov`]: chains, empirical conditionals, inverse-CDF sampling and
//!   generation of random-value-augmented training pairs.
//! - [`walker`]: 2D/3D orientation-changing random walkers driven by a network.
//! - [`tictactoe`]: rule-based player, winner-reaction data, network player.
//! - [`text`]: character- and word-level synthesis.

pub mod error;
pub mod markov;
pub mod nn;
pub mod rng;
pub mod text;
pub mod tictactoe;
pub mod walker;

pub use error::{Error, Result};
pub use markov::{
    augment, cumulative, generate_pairs, sample_index, AugmentedPair, CumulativeIntervals,
    DiscreteDistribution, EmpiricalConditional, MarkovChain,
};
pub use nn::{
    argmax_decode, init_network, mse_loss, Activation, Dataset, Gradients, Layer, LayerSpec,
    Network, TrainConfig,
};
