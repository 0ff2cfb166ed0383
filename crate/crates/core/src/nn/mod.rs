//! Dense feed-forward networks trained with backpropagation and SGD.
//!
//! Weights are stored row-major with shape `(out_dim, in_dim)`, so row `i`
//! of a layer's weight matrix holds the incoming weights of output unit `i`.

mod backprop;
mod model_io;
mod train;

pub use backprop::{backprop, sgd_step, Gradients, LayerGradients};
pub use model_io::{load_model, save_model, MODEL_FORMAT};
pub use train::{train, train_observed, Dataset, TrainConfig};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::rng;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    Sigmoid,
    Linear,
}

impl Activation {
    #[inline]
    pub fn apply(self, z: f64) -> f64 {
        match self {
            Activation::Sigmoid => 1.0 / (1.0 + (-z).exp()),
            Activation::Linear => z,
        }
    }

    /// Derivative expressed through the activation's output `y = f(z)`.
    #[inline]
    pub fn derivative_from_output(self, y: f64) -> f64 {
        match self {
            Activation::Sigmoid => y * (1.0 - y),
            Activation::Linear => 1.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Activation::Sigmoid => "sigmoid",
            Activation::Linear => "linear",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LayerSpec {
    pub in_dim: usize,
    pub out_dim: usize,
    pub activation: Activation,
}

impl LayerSpec {
    pub fn new(in_dim: usize, out_dim: usize, activation: Activation) -> Self {
        Self { in_dim, out_dim, activation }
    }

    /// Specs for a network with the given layer widths, sigmoid hidden layers
    /// and a linear output layer. `[10, 80, 30, 9]` yields three layers.
    pub fn chain(widths: &[usize]) -> Vec<LayerSpec> {
        let n = widths.len().saturating_sub(1);
        (0..n)
            .map(|k| {
                let act = if k + 1 == n { Activation::Linear } else { Activation::Sigmoid };
                LayerSpec::new(widths[k], widths[k + 1], act)
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Layer {
    in_dim: usize,
    out_dim: usize,
    activation: Activation,
    weights: Vec<f64>,
    bias: Vec<f64>,
}

impl Layer {
    /// Builds a layer from row-major weights of length `out_dim * in_dim`.
    pub fn from_parts(
        in_dim: usize,
        out_dim: usize,
        activation: Activation,
        weights: Vec<f64>,
        bias: Vec<f64>,
    ) -> Result<Self> {
        if in_dim == 0 || out_dim == 0 {
            return Err(Error::shape("layer dimensions must be positive"));
        }
        if weights.len() != in_dim * out_dim {
            return Err(Error::shape(format!(
                "weights have {} entries, expected {out_dim}x{in_dim}",
                weights.len()
            )));
        }
        if bias.len() != out_dim {
            return Err(Error::shape(format!("bias has {} entries, expected {out_dim}", bias.len())));
        }
        if weights.iter().chain(&bias).any(|v| !v.is_finite()) {
            return Err(Error::input("layer parameters must be finite"));
        }
        Ok(Self { in_dim, out_dim, activation, weights, bias })
    }

    pub fn in_dim(&self) -> usize {
        self.in_dim
    }

    pub fn out_dim(&self) -> usize {
        self.out_dim
    }

    pub fn activation(&self) -> Activation {
        self.activation
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn bias(&self) -> &[f64] {
        &self.bias
    }

    pub fn weight(&self, row: usize, col: usize) -> f64 {
        self.weights[row * self.in_dim + col]
    }

    pub(crate) fn weights_mut(&mut self) -> &mut [f64] {
        &mut self.weights
    }

    pub(crate) fn bias_mut(&mut self) -> &mut [f64] {
        &mut self.bias
    }

    /// `out = activation(W x + b)`.
    #[inline]
    pub(crate) fn apply_into(&self, x: &[f64], out: &mut [f64]) {
        debug_assert_eq!(x.len(), self.in_dim);
        debug_assert_eq!(out.len(), self.out_dim);
        for (i, o) in out.iter_mut().enumerate() {
            let row = &self.weights[i * self.in_dim..(i + 1) * self.in_dim];
            let z = row.iter().zip(x).fold(self.bias[i], |acc, (w, v)| acc + w * v);
            *o = self.activation.apply(z);
        }
    }
}

/// An ordered stack of dense layers. Immutable once trained; `forward` is a
/// pure function of the parameters and the input.
#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    layers: Vec<Layer>,
}

impl Network {
    pub fn from_layers(layers: Vec<Layer>) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::shape("a network needs at least one layer"));
        }
        for (k, pair) in layers.windows(2).enumerate() {
            if pair[0].out_dim != pair[1].in_dim {
                return Err(Error::shape(format!(
                    "layer {k} outputs {} values but layer {} expects {}",
                    pair[0].out_dim,
                    k + 1,
                    pair[1].in_dim
                )));
            }
        }
        Ok(Self { layers })
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub(crate) fn layers_mut(&mut self) -> &mut [Layer] {
        &mut self.layers
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].in_dim
    }

    pub fn output_dim(&self) -> usize {
        self.layers[self.layers.len() - 1].out_dim
    }

    pub fn specs(&self) -> Vec<LayerSpec> {
        self.layers
            .iter()
            .map(|l| LayerSpec::new(l.in_dim, l.out_dim, l.activation))
            .collect()
    }

    pub fn forward(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.input_dim() {
            return Err(Error::shape(format!(
                "input has {} values, network expects {}",
                x.len(),
                self.input_dim()
            )));
        }
        let mut current = x.to_vec();
        for layer in &self.layers {
            let mut next = vec![0.0; layer.out_dim];
            layer.apply_into(&current, &mut next);
            current = next;
        }
        Ok(current)
    }

    pub fn parameter_count(&self) -> usize {
        self.layers.iter().map(|l| l.weights.len() + l.bias.len()).sum()
    }
}

/// Uniform Glorot initialization in `[-a, a]`, `a = sqrt(6 / (in + out))`,
/// with zero biases.
pub fn init_network(specs: &[LayerSpec], seed: u64) -> Result<Network> {
    if specs.is_empty() {
        return Err(Error::shape("no layer specs given"));
    }
    let mut rng = rng::seeded(seed);
    let mut layers = Vec::with_capacity(specs.len());
    for spec in specs {
        if spec.in_dim == 0 || spec.out_dim == 0 {
            return Err(Error::shape("layer dimensions must be positive"));
        }
        let limit = (6.0 / (spec.in_dim + spec.out_dim) as f64).sqrt();
        let weights = (0..spec.in_dim * spec.out_dim)
            .map(|_| rng.random_range(-limit..=limit))
            .collect();
        layers.push(Layer {
            in_dim: spec.in_dim,
            out_dim: spec.out_dim,
            activation: spec.activation,
            weights,
            bias: vec![0.0; spec.out_dim],
        });
    }
    Network::from_layers(layers)
}

/// Mean squared error `(1/n) Σ (y_i - t_i)^2`.
pub fn mse_loss(y: &[f64], t: &[f64]) -> Result<f64> {
    if y.len() != t.len() {
        return Err(Error::shape(format!("output length {} vs target length {}", y.len(), t.len())));
    }
    if y.is_empty() {
        return Err(Error::input("cannot take the loss of empty vectors"));
    }
    Ok(y.iter().zip(t).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() / y.len() as f64)
}

/// Index of the largest entry; ties go to the smallest index.
pub fn argmax_decode(y: &[f64]) -> Result<usize> {
    if y.is_empty() {
        return Err(Error::input("cannot decode an empty vector"));
    }
    let mut best = 0;
    for (i, v) in y.iter().enumerate().skip(1) {
        if *v > y[best] {
            best = i;
        }
    }
    Ok(best)
}

pub fn one_hot(len: usize, index: usize) -> Vec<f64> {
    let mut v = vec![0.0; len];
    v[index] = 1.0;
    v
}
