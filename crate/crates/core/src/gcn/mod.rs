//! Dense graph convolutional networks with hand-written reverse-mode
//! gradients.
//!
//! Layer rule: `H⁽ˡ⁺¹⁾ = σ(G H⁽ˡ⁾ W⁽ˡ⁾)`, ReLU plus inverted dropout on the
//! hidden layers and a row-wise softmax on the output. Variants differ only in
//! the first layer:
//!
//! | variant     | first layer                      | later layers |
//! |-------------|----------------------------------|--------------|
//! | `FtVanilla` | `G · ((1S) ⊙ X) · W⁰` (S opt.)   | `G`          |
//! | `F`         | `((1S) ⊙ X) · W⁰`                | identity     |
//! | `T`         | `G · W⁰`                         | `G`          |
//! | `Tlr`       | `G · Wᵃ · Wᵇ` (`N×1`, `1×units`) | `G`          |

mod adam;
mod checkpoint;
mod model;
mod params;
mod train;

use std::fmt;

use serde::{Deserialize, Serialize};

pub use adam::{adam_step, AdamState, ADAM_BETA1, ADAM_BETA2, ADAM_EPSILON};
pub use checkpoint::{decode_checkpoint, encode_checkpoint, load_checkpoint, save_checkpoint, write_history_csv};
pub use model::{backward, cross_entropy, forward, loss, ForwardPass, GcnModel, TrainInputs};
pub use params::{FirstLayer, GcnParams};
pub use train::{evaluate, train, train_with, EpochRecord, History, TrainOptions};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Variant {
    /// Features and topology.
    #[serde(rename = "FTVanilla")]
    FtVanilla,
    /// Features only: every `G` is replaced by the identity.
    F,
    /// Topology only: `X` is replaced by the identity.
    T,
    /// Topology only with a rank-one first-layer weight.
    #[serde(rename = "TLR")]
    Tlr,
}

impl Variant {
    pub fn uses_features(self) -> bool {
        matches!(self, Variant::FtVanilla | Variant::F)
    }

    pub fn uses_topology(self) -> bool {
        !matches!(self, Variant::F)
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::FtVanilla => "FTVanilla",
            Variant::F => "F",
            Variant::T => "T",
            Variant::Tlr => "TLR",
        })
    }
}

impl std::str::FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ftvanilla" | "ft" => Ok(Variant::FtVanilla),
            "f" => Ok(Variant::F),
            "t" => Ok(Variant::T),
            "tlr" => Ok(Variant::Tlr),
            other => Err(Error::invalid(format!("unknown model variant {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GcnConfig {
    pub variant: Variant,
    /// Learnable per-feature weight vector on the input.
    pub use_s: bool,
    /// Hidden layer widths; the output layer (width `num_classes`) is extra.
    pub layer_units: Vec<usize>,
    pub num_classes: usize,
    pub learning_rate: f64,
    pub weight_decay: f64,
    pub dropout_p: f64,
    pub epochs: usize,
    pub seed: u64,
}

impl Default for GcnConfig {
    fn default() -> Self {
        GcnConfig {
            variant: Variant::FtVanilla,
            use_s: false,
            layer_units: vec![32, 32, 32],
            num_classes: 4,
            learning_rate: 0.01,
            weight_decay: 0.0005,
            dropout_p: 0.5,
            epochs: 200,
            seed: 0,
        }
    }
}

impl GcnConfig {
    pub fn validate(&self) -> Result<()> {
        if self.use_s && !self.variant.uses_features() {
            return Err(Error::invalid(format!(
                "the feature weight vector needs input features; variant {} has none",
                self.variant
            )));
        }
        if self.num_classes < 2 {
            return Err(Error::invalid("num_classes must be at least 2"));
        }
        if self.layer_units.contains(&0) {
            return Err(Error::invalid("hidden layers need at least one unit"));
        }
        if self.variant == Variant::Tlr && self.layer_units.is_empty() {
            return Err(Error::invalid("TLR needs a hidden first layer"));
        }
        if !(0.0..1.0).contains(&self.dropout_p) {
            return Err(Error::invalid(format!("dropout_p = {} outside [0,1)", self.dropout_p)));
        }
        if !(self.learning_rate.is_finite() && self.learning_rate > 0.0)
            || !(self.weight_decay.is_finite() && self.weight_decay >= 0.0)
        {
            return Err(Error::invalid("learning_rate must be > 0 and weight_decay >= 0"));
        }
        Ok(())
    }

    /// Total number of graph-convolution layers.
    pub fn depth(&self) -> usize {
        self.layer_units.len() + 1
    }

    /// Output width of layer `l`.
    pub fn layer_width(&self, l: usize) -> usize {
        self.layer_units.get(l).copied().unwrap_or(self.num_classes)
    }
}
