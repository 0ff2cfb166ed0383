//! Orientation-changing random walkers on the 2D and 3D integer lattice.
//!
//! The walker has one state per step direction (`+x, -x, +y, -y[, +z, -z]`)
//! and never repeats its previous direction: column `j` of the chain puts
//! `1 / (2d - 1)` on every other direction. A network trained on
//! `[r | one_hot(state)] -> one_hot(next)` pairs reproduces the walk when its
//! decoded output is fed back as the next input.

use std::io::Write;

use crate::markov::{
    augment, generate_pairs, pairs_to_dataset, simulate_chain, DiscreteDistribution,
    EmpiricalConditional, MarkovChain,
};
use crate::nn::{argmax_decode, init_network, one_hot, train, LayerSpec, Network, TrainConfig};
use crate::rng;
use crate::{Error, Result};

const AXES: [char; 3] = ['x', 'y', 'z'];

#[derive(Debug, Clone, PartialEq)]
pub struct WalkerModel {
    dimension: usize,
    chain: MarkovChain,
    step_vectors: Vec<Vec<i64>>,
}

impl WalkerModel {
    /// Walker over `2 * dimension` directions, uniform over the `2d - 1`
    /// directions other than the current one.
    pub fn new(dimension: usize) -> Result<Self> {
        if !(2..=3).contains(&dimension) {
            return Err(Error::input(format!("walker dimension must be 2 or 3, got {dimension}")));
        }
        let n = 2 * dimension;
        let p = 1.0 / (n - 1) as f64;
        let transition = (0..n)
            .map(|i| (0..n).map(|j| if i == j { 0.0 } else { p }).collect())
            .collect();
        let chain = MarkovChain::numbered(transition)?;
        let step_vectors = (0..n)
            .map(|s| {
                let mut v = vec![0; dimension];
                v[s / 2] = if s % 2 == 0 { 1 } else { -1 };
                v
            })
            .collect();
        Ok(Self { dimension, chain, step_vectors })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn states(&self) -> usize {
        2 * self.dimension
    }

    pub fn chain(&self) -> &MarkovChain {
        &self.chain
    }

    pub fn step_vector(&self, state: usize) -> Option<&[i64]> {
        self.step_vectors.get(state).map(Vec::as_slice)
    }

    /// `"+x"`, `"-x"`, `"+y"`, ...
    pub fn direction_name(&self, state: usize) -> String {
        let sign = if state.is_multiple_of(2) { '+' } else { '-' };
        format!("{sign}{}", AXES[state / 2])
    }

    pub fn state_of(&self, step: &[i64]) -> Option<usize> {
        self.step_vectors.iter().position(|v| v == step)
    }
}

pub fn build_walker_chain(dimension: usize) -> Result<WalkerModel> {
    WalkerModel::new(dimension)
}

/// Where the conditional table used for pair generation comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableSource {
    /// Read exactly off the chain's columns.
    Exact,
    /// Estimated from an oracle simulation of this many steps.
    Simulated { steps: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct WalkerTraining {
    pub hidden: Vec<usize>,
    pub train: TrainConfig,
    pub pairs_per_state: usize,
    pub seed: u64,
    pub source: TableSource,
}

impl WalkerTraining {
    /// Defaults for a `[2d+1 : 32 : 2d]` network. The 3D walker has five
    /// intervals per state and needs twice the epochs to sharpen them.
    pub fn for_dimension(dimension: usize) -> Self {
        Self {
            hidden: vec![32],
            train: TrainConfig {
                learning_rate: 1.0,
                epochs: if dimension >= 3 { 600 } else { 300 },
                batch_size: 8,
                rng_seed: 1,
                shuffle: true,
            },
            pairs_per_state: 2000,
            seed: 1,
            source: TableSource::Exact,
        }
    }
}

/// Empirical table for the walker from `source`.
pub fn walker_table(model: &WalkerModel, source: TableSource, seed: u64) -> Result<EmpiricalConditional> {
    match source {
        TableSource::Exact => EmpiricalConditional::from_chain(&model.chain),
        TableSource::Simulated { steps } => {
            if steps == 0 {
                return Err(Error::input("simulation needs at least one step"));
            }
            let n = model.states();
            let states = simulate_chain(&model.chain, 0, steps, seed)?;
            crate::markov::estimate_empirical(
                states.windows(2).map(|w| (one_hot(n, w[0]), one_hot(n, w[1]))),
            )
        }
    }
}

/// Trains a `[2d+1 : hidden.. : 2d]` network on random-value-augmented walker
/// transitions.
pub fn train_walker_net(model: &WalkerModel, cfg: &WalkerTraining) -> Result<Network> {
    let n = model.states();
    let table = walker_table(model, cfg.source, cfg.seed)?;
    let pairs = generate_pairs(&table, cfg.pairs_per_state, cfg.seed.wrapping_add(1))?;
    let data = pairs_to_dataset(pairs)?;
    let mut widths = vec![n + 1];
    widths.extend(&cfg.hidden);
    widths.push(n);
    let net = init_network(&LayerSpec::chain(&widths), cfg.seed.wrapping_add(2))?;
    let (net, _) = train(net, &data, &cfg.train)?;
    Ok(net)
}

/// Network-decoded next state for `state` under switch value `r`.
pub fn net_step(net: &Network, state: usize, r: f64) -> Result<usize> {
    let n = net.output_dim();
    if state >= n {
        return Err(Error::input(format!("state {state} out of range")));
    }
    argmax_decode(&net.forward(&augment(&one_hot(n, state), r)?)?)
}

/// Walk driven by the network: each step draws a fresh `r`, feeds
/// `[r | one_hot(current)]`, and re-binarizes the decoded output as the next
/// input.
pub fn run_net_walk(net: &Network, start_state: usize, n_steps: usize, seed: u64) -> Result<Vec<usize>> {
    if net.input_dim() != net.output_dim() + 1 {
        return Err(Error::shape(format!(
            "walker network must map n+1 inputs to n outputs, got {}->{}",
            net.input_dim(),
            net.output_dim()
        )));
    }
    if start_state >= net.output_dim() {
        return Err(Error::input(format!("start state {start_state} out of range")));
    }
    let mut rng = rng::seeded(seed);
    let mut states = Vec::with_capacity(n_steps + 1);
    states.push(start_state);
    let mut current = start_state;
    for _ in 0..n_steps {
        current = net_step(net, current, rng::unit(&mut rng))?;
        states.push(current);
    }
    Ok(states)
}

/// Lattice points visited by a walk; point `k + 1` is point `k` plus the step
/// of `states[k]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trajectory {
    pub points: Vec<Vec<i64>>,
}

pub fn states_to_trajectory(states: &[usize], model: &WalkerModel) -> Result<Trajectory> {
    let mut points = Vec::with_capacity(states.len() + 1);
    let mut current = vec![0i64; model.dimension];
    points.push(current.clone());
    for &s in states {
        let step = model
            .step_vector(s)
            .ok_or_else(|| Error::input(format!("state {s} out of range")))?;
        for (c, d) in current.iter_mut().zip(step) {
            *c += d;
        }
        points.push(current.clone());
    }
    Ok(Trajectory { points })
}

fn visit_counts(states: &[usize], n_states: usize) -> Result<Vec<u64>> {
    if states.is_empty() {
        return Err(Error::input("no states given"));
    }
    let mut counts = vec![0u64; n_states];
    for &s in states {
        *counts
            .get_mut(s)
            .ok_or_else(|| Error::input(format!("state {s} out of range")))? += 1;
    }
    Ok(counts)
}

pub fn visit_frequencies(states: &[usize], n_states: usize) -> Result<DiscreteDistribution> {
    DiscreteDistribution::from_counts(&visit_counts(states, n_states)?)
}

/// Column-normalized bigram counts of a state sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionEstimate {
    /// `matrix[i][j]` estimates `p(i | j)`.
    pub matrix: Vec<Vec<f64>>,
    /// `true` for columns whose state was never left; those stay all-zero.
    pub unvisited: Vec<bool>,
}

impl TransitionEstimate {
    /// L1 distance between column `j` and the same column of `chain`.
    pub fn column_l1(&self, chain: &MarkovChain, j: usize) -> f64 {
        chain.column(j).iter().enumerate().map(|(i, p)| (self.matrix[i][j] - p).abs()).sum()
    }
}

pub fn empirical_transition(states: &[usize], n_states: usize) -> Result<TransitionEstimate> {
    visit_counts(states, n_states)?;
    let mut counts = vec![vec![0u64; n_states]; n_states];
    for w in states.windows(2) {
        counts[w[1]][w[0]] += 1;
    }
    let mut matrix = vec![vec![0.0; n_states]; n_states];
    let mut unvisited = vec![false; n_states];
    for j in 0..n_states {
        let total: u64 = (0..n_states).map(|i| counts[i][j]).sum();
        if total == 0 {
            unvisited[j] = true;
            continue;
        }
        for i in 0..n_states {
            matrix[i][j] = counts[i][j] as f64 / total as f64;
        }
    }
    Ok(TransitionEstimate { matrix, unvisited })
}

/// Fraction of the grid `r = 0.005, 0.015, ..., 0.995` on which the network
/// and the chain's inverse-CDF step agree, for each state.
pub fn grid_agreement(net: &Network, chain: &MarkovChain) -> Result<Vec<f64>> {
    (0..chain.len())
        .map(|j| {
            let mut hits = 0;
            for k in 0..100 {
                let r = (k as f64 + 0.5) / 100.0;
                if net_step(net, j, r)? == crate::markov::chain_step(chain, j, r)? {
                    hits += 1;
                }
            }
            Ok(hits as f64 / 100.0)
        })
        .collect()
}

/// CSV with header `step,x,y[,z]`, one row per point.
pub fn write_trajectory_csv<W: Write>(traj: &Trajectory, mut out: W) -> Result<()> {
    let dim = traj.points.first().map_or(2, Vec::len);
    let header: Vec<String> = AXES[..dim].iter().map(char::to_string).collect();
    writeln!(out, "step,{}", header.join(","))?;
    for (k, p) in traj.points.iter().enumerate() {
        let coords: Vec<String> = p.iter().map(i64::to_string).collect();
        writeln!(out, "{k},{}", coords.join(","))?;
    }
    Ok(())
}

/// CSV with header `state,label,visits,frequency`.
pub fn write_frequency_csv<W: Write>(states: &[usize], model: &WalkerModel, mut out: W) -> Result<()> {
    let counts = visit_counts(states, model.states())?;
    let total = states.len() as f64;
    writeln!(out, "state,label,visits,frequency")?;
    for (s, c) in counts.iter().enumerate() {
        writeln!(out, "{s},{},{c},{}", model.direction_name(s), *c as f64 / total)?;
    }
    Ok(())
}
