//! Graph representatives: symmetric-normalised, self-looped transforms of the
//! adjacency matrix or of a node-similarity matrix (Katz, rooted PageRank,
//! graph gravity).

mod augment;
mod gravity;
pub mod io;
mod katz;
mod representative;
mod rpr;

use std::fmt;

use serde::{Deserialize, Serialize};

pub use augment::{apply_thresholds, augment, l2_normalize_rows};
pub use gravity::{gg_matrix, gg_raw_scores};
pub use katz::katz_matrix;
pub use representative::{build_representative, similarity_pipeline, symmetric_normalize, GraphRepresentative};
pub use rpr::rpr_matrix;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SimilarityKind {
    Adjacency,
    Katz,
    Rpr,
    Gg,
}

impl SimilarityKind {
    /// Short tag used in model cell names.
    pub fn tag(self) -> &'static str {
        match self {
            SimilarityKind::Adjacency => "vanilla",
            SimilarityKind::Katz => "katz",
            SimilarityKind::Rpr => "RPR",
            SimilarityKind::Gg => "GG",
        }
    }
}

impl std::str::FromStr for SimilarityKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "adjacency" | "adj" | "vanilla" => Ok(SimilarityKind::Adjacency),
            "katz" => Ok(SimilarityKind::Katz),
            "rpr" => Ok(SimilarityKind::Rpr),
            "gg" | "gravity" => Ok(SimilarityKind::Gg),
            other => Err(Error::invalid(format!("unknown similarity kind {other:?}"))),
        }
    }
}

/// Two-threshold clamp applied after L2 row normalisation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Thresholds {
    /// Entries `<= lo` become 0, entries `> hi` become 1, the rest are kept.
    Range { lo: f64, hi: f64 },
    /// Binarise at the mean of the non-zero entries.
    Auto,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds::Range { lo: 0.0, hi: 1.0 }
    }
}

impl fmt::Display for Thresholds {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Thresholds::Range { lo, hi } => write!(f, "{lo:.1}-{hi:.1}"),
            Thresholds::Auto => f.write_str("auto"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SimilaritySpec {
    pub kind: SimilarityKind,
    pub katz_beta: f64,
    pub katz_max_power: u32,
    pub rpr_alpha: f64,
    pub thresholds: Thresholds,
}

impl Default for SimilaritySpec {
    fn default() -> Self {
        SimilaritySpec {
            kind: SimilarityKind::Adjacency,
            katz_beta: 0.005,
            katz_max_power: 5,
            rpr_alpha: 0.85,
            thresholds: Thresholds::default(),
        }
    }
}

impl SimilaritySpec {
    pub fn adjacency() -> Self {
        SimilaritySpec::default()
    }

    pub fn of(kind: SimilarityKind, thresholds: Thresholds) -> Self {
        SimilaritySpec {
            kind,
            thresholds,
            ..SimilaritySpec::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.katz_max_power < 1 {
            return Err(Error::invalid("katz_max_power must be at least 1"));
        }
        if !(self.katz_beta >= 0.0 && self.katz_beta.is_finite()) {
            return Err(Error::invalid(format!("katz_beta = {} must be >= 0", self.katz_beta)));
        }
        if !(self.rpr_alpha > 0.0 && self.rpr_alpha < 1.0) {
            return Err(Error::invalid(format!("rpr_alpha = {} outside (0,1)", self.rpr_alpha)));
        }
        if let Thresholds::Range { lo, hi } = self.thresholds {
            if !(lo.is_finite() && hi.is_finite()) || lo > hi {
                return Err(Error::invalid(format!("thresholds ({lo}, {hi}) must satisfy lo <= hi")));
            }
        }
        Ok(())
    }

    /// Key identifying the representative this spec builds; parameters that
    /// the kind ignores are left out.
    pub fn cache_key(&self) -> String {
        match self.kind {
            SimilarityKind::Adjacency => "adjacency".to_string(),
            SimilarityKind::Katz => format!("katz:{}:{}:{:?}", self.katz_beta, self.katz_max_power, self.thresholds),
            SimilarityKind::Rpr => format!("rpr:{}:{:?}", self.rpr_alpha, self.thresholds),
            SimilarityKind::Gg => format!("gg:{:?}", self.thresholds),
        }
    }
}
