use ndarray::Array2;
use rand::Rng;

use super::{GcnConfig, Variant};
use crate::rng::StreamRng;

#[derive(Debug, Clone, PartialEq)]
pub enum FirstLayer {
    Dense(Array2<f64>),
    /// `a` is `in × 1`, `b` is `1 × units`.
    LowRank {
        a: Array2<f64>,
        b: Array2<f64>,
    },
}

/// Trainable tensors. The same shape is reused for gradients and for the
/// Adam moment estimates.
#[derive(Debug, Clone, PartialEq)]
pub struct GcnParams {
    pub first: FirstLayer,
    /// Weights of layers `1..depth`, the last being the output layer.
    pub rest: Vec<Array2<f64>>,
    /// Feature weights as a `1 × f` row.
    pub s: Option<Array2<f64>>,
}

fn glorot(rows: usize, cols: usize, rng: &mut StreamRng) -> Array2<f64> {
    let limit = (6.0 / (rows + cols) as f64).sqrt();
    Array2::from_shape_simple_fn((rows, cols), || rng.gen_range(-limit..=limit))
}

impl GcnParams {
    /// Glorot-uniform weights; `S` starts at all ones.
    pub fn init(cfg: &GcnConfig, nodes: usize, features: usize, rng: &mut StreamRng) -> Self {
        let input = if cfg.variant.uses_features() { features } else { nodes };
        let first_width = cfg.layer_width(0);
        let first = match cfg.variant {
            Variant::Tlr => FirstLayer::LowRank {
                a: glorot(input, 1, rng),
                b: glorot(1, first_width, rng),
            },
            _ => FirstLayer::Dense(glorot(input, first_width, rng)),
        };
        let rest = (1..cfg.depth())
            .map(|l| glorot(cfg.layer_width(l - 1), cfg.layer_width(l), rng))
            .collect();
        let s = cfg.use_s.then(|| Array2::ones((1, features)));
        GcnParams { first, rest, s }
    }

    pub fn zeros_like(&self) -> Self {
        let z = |m: &Array2<f64>| Array2::zeros(m.raw_dim());
        GcnParams {
            first: match &self.first {
                FirstLayer::Dense(w) => FirstLayer::Dense(z(w)),
                FirstLayer::LowRank { a, b } => FirstLayer::LowRank { a: z(a), b: z(b) },
            },
            rest: self.rest.iter().map(z).collect(),
            s: self.s.as_ref().map(z),
        }
    }

    /// Every tensor in a fixed order: first layer, later layers, then `S`.
    pub fn tensors(&self) -> Vec<&Array2<f64>> {
        let mut out = Vec::with_capacity(self.rest.len() + 3);
        match &self.first {
            FirstLayer::Dense(w) => out.push(w),
            FirstLayer::LowRank { a, b } => {
                out.push(a);
                out.push(b);
            }
        }
        out.extend(self.rest.iter());
        out.extend(self.s.iter());
        out
    }

    pub fn tensors_mut(&mut self) -> Vec<&mut Array2<f64>> {
        let mut out = Vec::with_capacity(self.rest.len() + 3);
        match &mut self.first {
            FirstLayer::Dense(w) => out.push(w),
            FirstLayer::LowRank { a, b } => {
                out.push(a);
                out.push(b);
            }
        }
        out.extend(self.rest.iter_mut());
        out.extend(self.s.iter_mut());
        out
    }

    pub fn parameter_count(&self) -> usize {
        self.tensors().iter().map(|t| t.len()).sum()
    }

    /// Parameters of the first layer only.
    pub fn first_layer_parameter_count(&self) -> usize {
        match &self.first {
            FirstLayer::Dense(w) => w.len(),
            FirstLayer::LowRank { a, b } => a.len() + b.len(),
        }
    }

    /// Frobenius norm of each tensor, in [`tensors`](Self::tensors) order.
    pub fn norms(&self) -> Vec<f64> {
        self.tensors()
            .iter()
            .map(|t| t.iter().map(|v| v * v).sum::<f64>().sqrt())
            .collect()
    }

    pub fn is_finite(&self) -> bool {
        self.tensors().iter().all(|t| t.iter().all(|v| v.is_finite()))
    }
}
