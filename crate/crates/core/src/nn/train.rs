use std::ops::ControlFlow;

use rand::seq::SliceRandom;

use super::backprop::{accumulate, apply_sgd, Gradients, Scratch};
use super::{mse_loss, Network};
use crate::rng;
use crate::{Error, Result};

/// Input/target pairs with uniform input and target lengths.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    inputs: Vec<Vec<f64>>,
    targets: Vec<Vec<f64>>,
}

impl Dataset {
    pub fn new(pairs: Vec<(Vec<f64>, Vec<f64>)>) -> Result<Self> {
        let (inputs, targets): (Vec<_>, Vec<_>) = pairs.into_iter().unzip();
        Self::from_parts(inputs, targets)
    }

    pub fn from_parts(inputs: Vec<Vec<f64>>, targets: Vec<Vec<f64>>) -> Result<Self> {
        if inputs.is_empty() {
            return Err(Error::input("dataset is empty"));
        }
        if inputs.len() != targets.len() {
            return Err(Error::shape("inputs and targets differ in count"));
        }
        let (n_in, n_out) = (inputs[0].len(), targets[0].len());
        if inputs.iter().any(|x| x.len() != n_in) || targets.iter().any(|t| t.len() != n_out) {
            return Err(Error::shape("dataset rows have inconsistent lengths"));
        }
        Ok(Self { inputs, targets })
    }

    pub fn len(&self) -> usize {
        self.inputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inputs.is_empty()
    }

    pub fn input_dim(&self) -> usize {
        self.inputs[0].len()
    }

    pub fn target_dim(&self) -> usize {
        self.targets[0].len()
    }

    pub fn inputs(&self) -> &[Vec<f64>] {
        &self.inputs
    }

    pub fn targets(&self) -> &[Vec<f64>] {
        &self.targets
    }

    pub fn pairs(&self) -> impl Iterator<Item = (&[f64], &[f64])> {
        self.inputs.iter().map(Vec::as_slice).zip(self.targets.iter().map(Vec::as_slice))
    }

    /// Mean per-pair loss of `net` over the whole dataset.
    pub fn mean_loss(&self, net: &Network) -> Result<f64> {
        let mut total = 0.0;
        for (x, t) in self.pairs() {
            total += mse_loss(&net.forward(x)?, t)?;
        }
        Ok(total / self.len() as f64)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub epochs: usize,
    pub batch_size: usize,
    pub rng_seed: u64,
    pub shuffle: bool,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self { learning_rate: 0.1, epochs: 100, batch_size: 16, rng_seed: 0, shuffle: true }
    }
}

impl TrainConfig {
    fn validate(&self, data: &Dataset) -> Result<()> {
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::input("learning rate must be positive"));
        }
        if self.epochs == 0 {
            return Err(Error::input("epochs must be positive"));
        }
        if self.batch_size == 0 || self.batch_size > data.len() {
            return Err(Error::input(format!(
                "batch size {} must lie in 1..={}",
                self.batch_size,
                data.len()
            )));
        }
        Ok(())
    }
}

/// Mini-batch SGD on mean squared error. Returns the trained network and the
/// mean dataset loss after each epoch.
pub fn train(net: Network, data: &Dataset, config: &TrainConfig) -> Result<(Network, Vec<f64>)> {
    train_observed(net, data, config, |_, _, _| ControlFlow::Continue(()))
}

/// Like [`train`], calling `on_epoch(epoch, net, loss)` after every epoch.
/// Returning `ControlFlow::Break` stops training early.
pub fn train_observed<F>(
    mut net: Network,
    data: &Dataset,
    config: &TrainConfig,
    mut on_epoch: F,
) -> Result<(Network, Vec<f64>)>
where
    F: FnMut(usize, &Network, f64) -> ControlFlow<()>,
{
    config.validate(data)?;
    if data.input_dim() != net.input_dim() || data.target_dim() != net.output_dim() {
        return Err(Error::shape(format!(
            "dataset is {}->{} but network is {}->{}",
            data.input_dim(),
            data.target_dim(),
            net.input_dim(),
            net.output_dim()
        )));
    }

    let mut rng = rng::seeded(config.rng_seed);
    let mut order: Vec<usize> = (0..data.len()).collect();
    let mut grads = Gradients::zeros_like(&net);
    let mut scratch = Scratch::new(&net);
    let mut history = Vec::with_capacity(config.epochs);

    for epoch in 0..config.epochs {
        if config.shuffle {
            order.shuffle(&mut rng);
        }
        for batch in order.chunks(config.batch_size) {
            grads.fill_zero();
            for &i in batch {
                accumulate(&net, &data.inputs[i], &data.targets[i], &mut scratch, &mut grads);
            }
            grads.scale(1.0 / batch.len() as f64);
            apply_sgd(&mut net, &grads, config.learning_rate)?;
        }
        let loss = epoch_loss(&net, data, &mut scratch);
        if !loss.is_finite() {
            return Err(Error::input(format!("training diverged at epoch {epoch}")));
        }
        history.push(loss);
        if on_epoch(epoch, &net, loss).is_break() {
            break;
        }
    }
    Ok((net, history))
}

fn epoch_loss(net: &Network, data: &Dataset, scratch: &mut Scratch) -> f64 {
    let total: f64 = data
        .pairs()
        .map(|(x, t)| {
            let y = scratch.forward(net, x);
            y.iter().zip(t).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() / t.len() as f64
        })
        .sum();
    total / data.len() as f64
}
