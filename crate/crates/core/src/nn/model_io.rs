//! Model files: a JSON document
//! `{"format":"mcnn-model-v1","layers":[{"in","out","activation","weights","bias"}]}`
//! with every real written to 17 significant digits, which round-trips f64
//! exactly.

use std::fmt::Write as _;

use serde::Deserialize;

use super::{Activation, Layer, Network};
use crate::{Error, Result};

pub const MODEL_FORMAT: &str = "mcnn-model-v1";

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawModel {
    format: String,
    layers: Vec<RawLayer>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLayer {
    #[serde(rename = "in")]
    in_dim: usize,
    #[serde(rename = "out")]
    out_dim: usize,
    activation: Activation,
    weights: Vec<Vec<f64>>,
    bias: Vec<f64>,
}

pub(crate) fn write_real(out: &mut String, v: f64) {
    // `{:e}` with 16 fractional digits is 17 significant digits.
    write!(out, "{v:.16e}").unwrap();
}

fn write_reals(out: &mut String, values: &[f64]) {
    out.push('[');
    for (i, v) in values.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        write_real(out, *v);
    }
    out.push(']');
}

pub fn save_model(net: &Network) -> Vec<u8> {
    let mut out = String::new();
    write!(out, "{{\"format\":\"{MODEL_FORMAT}\",\"layers\":[").unwrap();
    for (k, layer) in net.layers().iter().enumerate() {
        if k > 0 {
            out.push(',');
        }
        write!(
            out,
            "\n{{\"in\":{},\"out\":{},\"activation\":\"{}\",\"weights\":[",
            layer.in_dim(),
            layer.out_dim(),
            layer.activation().name()
        )
        .unwrap();
        for (i, row) in layer.weights().chunks(layer.in_dim()).enumerate() {
            if i > 0 {
                out.push(',');
            }
            write_reals(&mut out, row);
        }
        out.push_str("],\"bias\":");
        write_reals(&mut out, layer.bias());
        out.push('}');
    }
    out.push_str("\n]}\n");
    out.into_bytes()
}

pub fn load_model(bytes: &[u8]) -> Result<Network> {
    let raw: RawModel =
        serde_json::from_slice(bytes).map_err(|e| Error::parse(format!("model file: {e}")))?;
    if raw.format != MODEL_FORMAT {
        return Err(Error::parse(format!("unsupported model format {:?}", raw.format)));
    }
    let mut layers = Vec::with_capacity(raw.layers.len());
    for (k, l) in raw.layers.into_iter().enumerate() {
        if l.weights.len() != l.out_dim || l.weights.iter().any(|r| r.len() != l.in_dim) {
            return Err(Error::parse(format!(
                "layer {k}: weights do not form a {}x{} matrix",
                l.out_dim, l.in_dim
            )));
        }
        let weights = l.weights.into_iter().flatten().collect();
        let layer = Layer::from_parts(l.in_dim, l.out_dim, l.activation, weights, l.bias)
            .map_err(|e| Error::parse(format!("layer {k}: {e}")))?;
        layers.push(layer);
    }
    Network::from_layers(layers).map_err(|e| Error::parse(e.to_string()))
}
