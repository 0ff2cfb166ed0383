use super::{Layer, Network};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct LayerGradients {
    /// Row-major, same shape as the layer's weights.
    pub d_weights: Vec<f64>,
    pub d_bias: Vec<f64>,
}

/// Per-layer partial derivatives, shape-congruent with the owning network.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub layers: Vec<LayerGradients>,
}

impl Gradients {
    pub fn zeros_like(net: &Network) -> Self {
        let layers = net
            .layers()
            .iter()
            .map(|l| LayerGradients {
                d_weights: vec![0.0; l.weights().len()],
                d_bias: vec![0.0; l.out_dim()],
            })
            .collect();
        Self { layers }
    }

    pub fn fill_zero(&mut self) {
        for g in &mut self.layers {
            g.d_weights.fill(0.0);
            g.d_bias.fill(0.0);
        }
    }

    pub fn scale(&mut self, factor: f64) {
        for g in &mut self.layers {
            g.d_weights.iter_mut().chain(g.d_bias.iter_mut()).for_each(|v| *v *= factor);
        }
    }

    pub fn is_congruent(&self, net: &Network) -> bool {
        self.layers.len() == net.layers().len()
            && self.layers.iter().zip(net.layers()).all(|(g, l)| {
                g.d_weights.len() == l.weights().len() && g.d_bias.len() == l.out_dim()
            })
    }
}

/// Reusable forward activations for one sample.
pub(crate) struct Scratch {
    activations: Vec<Vec<f64>>,
    deltas: Vec<Vec<f64>>,
}

impl Scratch {
    pub(crate) fn new(net: &Network) -> Self {
        let mut activations = vec![vec![0.0; net.input_dim()]];
        activations.extend(net.layers().iter().map(|l| vec![0.0; l.out_dim()]));
        let deltas = net.layers().iter().map(|l| vec![0.0; l.out_dim()]).collect();
        Self { activations, deltas }
    }

    pub(crate) fn forward(&mut self, net: &Network, x: &[f64]) -> &[f64] {
        self.activations[0].copy_from_slice(x);
        for (k, layer) in net.layers().iter().enumerate() {
            let (before, after) = self.activations.split_at_mut(k + 1);
            layer.apply_into(&before[k], &mut after[0]);
        }
        self.activations.last().unwrap()
    }
}

/// Runs one forward/backward pass for `(x, t)` and adds the MSE gradients to
/// `acc`. Returns the sample loss. Shapes are assumed validated.
pub(crate) fn accumulate(
    net: &Network,
    x: &[f64],
    t: &[f64],
    scratch: &mut Scratch,
    acc: &mut Gradients,
) -> f64 {
    scratch.forward(net, x);
    let layers = net.layers();
    let last = layers.len() - 1;
    let n = t.len() as f64;

    let output = &scratch.activations[last + 1];
    let mut loss = 0.0;
    {
        let delta = &mut scratch.deltas[last];
        for i in 0..t.len() {
            let err = output[i] - t[i];
            loss += err * err;
            delta[i] = 2.0 * err / n * layers[last].activation().derivative_from_output(output[i]);
        }
    }

    for k in (0..layers.len()).rev() {
        let layer: &Layer = &layers[k];
        let input = &scratch.activations[k];
        let grads = &mut acc.layers[k];
        {
            let delta = &scratch.deltas[k];
            for (i, d) in delta.iter().enumerate() {
                grads.d_bias[i] += d;
                let row = &mut grads.d_weights[i * layer.in_dim()..(i + 1) * layer.in_dim()];
                for (g, a) in row.iter_mut().zip(input) {
                    *g += d * a;
                }
            }
        }
        if k > 0 {
            let (lower, upper) = scratch.deltas.split_at_mut(k);
            let delta = &upper[0];
            let prev = &mut lower[k - 1];
            let prev_act = layers[k - 1].activation();
            prev.fill(0.0);
            for (i, d) in delta.iter().enumerate() {
                let row = &layer.weights()[i * layer.in_dim()..(i + 1) * layer.in_dim()];
                for (p, w) in prev.iter_mut().zip(row) {
                    *p += d * w;
                }
            }
            for (p, a) in prev.iter_mut().zip(input) {
                *p *= prev_act.derivative_from_output(*a);
            }
        }
    }
    loss / n
}

/// Exact gradients of `mse_loss(forward(net, x), t)` with respect to every
/// weight and bias.
pub fn backprop(net: &Network, x: &[f64], t: &[f64]) -> Result<(f64, Gradients)> {
    if x.len() != net.input_dim() {
        return Err(Error::shape(format!(
            "input has {} values, network expects {}",
            x.len(),
            net.input_dim()
        )));
    }
    if t.len() != net.output_dim() {
        return Err(Error::shape(format!(
            "target has {} values, network produces {}",
            t.len(),
            net.output_dim()
        )));
    }
    let mut grads = Gradients::zeros_like(net);
    let mut scratch = Scratch::new(net);
    let loss = accumulate(net, x, t, &mut scratch, &mut grads);
    Ok((loss, grads))
}

/// `W <- W - lr * dW`, `b <- b - lr * db` for every layer.
pub fn sgd_step(mut net: Network, grads: &Gradients, learning_rate: f64) -> Result<Network> {
    apply_sgd(&mut net, grads, learning_rate)?;
    Ok(net)
}

pub(crate) fn apply_sgd(net: &mut Network, grads: &Gradients, learning_rate: f64) -> Result<()> {
    if !grads.is_congruent(net) {
        return Err(Error::shape("gradients do not match the network's layer shapes"));
    }
    for (layer, g) in net.layers_mut().iter_mut().zip(&grads.layers) {
        for (w, d) in layer.weights_mut().iter_mut().zip(&g.d_weights) {
            *w -= learning_rate * d;
        }
        for (b, d) in layer.bias_mut().iter_mut().zip(&g.d_bias) {
            *b -= learning_rate * d;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nn::{init_network, mse_loss, Activation, Layer, LayerSpec};

    fn scalar_linear(w: f64) -> Network {
        Network::from_layers(vec![
            Layer::from_parts(1, 1, Activation::Linear, vec![w], vec![0.0]).unwrap()
        ])
        .unwrap()
    }

    #[test]
    fn zero_error_gives_zero_output_delta() {
        let net = init_network(&LayerSpec::chain(&[3, 4, 2]), 5).unwrap();
        let x = [0.2, -0.7, 1.1];
        let t = net.forward(&x).unwrap();
        let (loss, grads) = backprop(&net, &x, &t).unwrap();
        assert_eq!(loss, 0.0);
        assert!(grads.layers.iter().all(|g| g.d_bias.iter().all(|v| *v == 0.0)));
    }

    #[test]
    fn scalar_linear_gradient_is_two_w() {
        for w in [-1.5, 0.0, 0.25, 3.0] {
            let (loss, grads) = backprop(&scalar_linear(w), &[1.0], &[0.0]).unwrap();
            assert_eq!(loss, w * w);
            assert_eq!(grads.layers[0].d_weights, vec![2.0 * w]);
            assert_eq!(grads.layers[0].d_bias, vec![2.0 * w]);
        }
    }

    #[test]
    fn backprop_matches_finite_differences_on_sigmoid_stack() {
        let net = init_network(&LayerSpec::chain(&[3, 5, 4, 2]), 11).unwrap();
        let x = [0.4, -0.3, 0.9];
        let t = [1.0, -0.5];
        let (_, grads) = backprop(&net, &x, &t).unwrap();
        let h = 1e-5;
        for (k, layer) in net.layers().iter().enumerate() {
            for idx in 0..layer.weights().len() {
                let mut plus = net.clone();
                plus.layers_mut()[k].weights_mut()[idx] += h;
                let mut minus = net.clone();
                minus.layers_mut()[k].weights_mut()[idx] -= h;
                let fd = (mse_loss(&plus.forward(&x).unwrap(), &t).unwrap()
                    - mse_loss(&minus.forward(&x).unwrap(), &t).unwrap())
                    / (2.0 * h);
                assert!((fd - grads.layers[k].d_weights[idx]).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn sgd_step_examples() {
        let net = scalar_linear(1.0);
        let mut grads = Gradients::zeros_like(&net);
        assert_eq!(sgd_step(net.clone(), &grads, 0.5).unwrap(), net);
        grads.layers[0].d_weights[0] = 2.0;
        assert_eq!(sgd_step(net.clone(), &grads, 0.0).unwrap(), net);
        let stepped = sgd_step(net, &grads, 0.1).unwrap();
        assert!((stepped.layers()[0].weights()[0] - 0.8).abs() < 1e-15);
    }

    #[test]
    fn sgd_step_rejects_incongruent_grads() {
        let a = init_network(&LayerSpec::chain(&[2, 3, 1]), 0).unwrap();
        let b = init_network(&LayerSpec::chain(&[2, 4, 1]), 0).unwrap();
        let grads = Gradients::zeros_like(&b);
        assert!(matches!(sgd_step(a, &grads, 0.1), Err(Error::Shape(_))));
    }

    #[test]
    fn backprop_rejects_bad_shapes() {
        let net = scalar_linear(1.0);
        assert!(backprop(&net, &[1.0, 2.0], &[0.0]).is_err());
        assert!(backprop(&net, &[1.0], &[0.0, 1.0]).is_err());
    }
}
