//! sDNA-driven link formation: population generation, pair scoring, the
//! socialise round, mutation and the dynamic/event-stream drivers.

mod dynamic;
mod mutate;
pub mod output;
mod score;
mod socialise;

use ndarray::Array2;
use rand::Rng;
use serde::{Deserialize, Serialize};

pub use dynamic::{emit_event_stream, run_dynamic, EdgeEvent, EventStream, Snapshot};
pub use mutate::mutate;
pub use score::{feature_score, feature_score_one_way, pair_score, path_score, popularity_score, ScoringContext};
pub use socialise::{socialise, socialise_with, ScoredPair, SocialiseOptions, SocialiseOutcome, StopRule};

use crate::error::{Error, Result};
use crate::graph::SocialGraph;
use crate::rng::{self, StreamRng};

/// Latent preference record shared by a group of nodes; its `id` is the
/// class label of every subscriber.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sdna {
    pub id: usize,
    /// Per-feature preference strength in `[0, 1]`.
    pub w: Vec<f64>,
    /// Per-feature sign, `+1` or `-1`.
    pub l: Vec<i8>,
    /// Preferential-attachment weight in `[0, 1]`.
    pub d: f64,
    /// Weights for walk lengths `2..=q`, strictly decreasing and positive.
    pub k: Vec<f64>,
}

impl Sdna {
    pub fn check(&self, f: usize, q: usize) -> Result<()> {
        let fail = |msg: String| Err(Error::invalid(format!("sDNA {}: {msg}", self.id)));
        if self.w.len() != f || self.l.len() != f {
            return fail(format!("w/l length {}/{} != {f}", self.w.len(), self.l.len()));
        }
        if let Some(bad) = self.w.iter().find(|w| !(0.0..=1.0).contains(*w)) {
            return fail(format!("w entry {bad} outside [0,1]"));
        }
        if let Some(bad) = self.l.iter().find(|l| **l != 1 && **l != -1) {
            return fail(format!("l entry {bad} not ±1"));
        }
        if !(0.0..=1.0).contains(&self.d) {
            return fail(format!("d = {} outside [0,1]", self.d));
        }
        if self.k.len() + 1 != q {
            return fail(format!("k has {} entries, expected {}", self.k.len(), q - 1));
        }
        if self.k.windows(2).any(|p| p[0] <= p[1]) || self.k.last().is_some_and(|k| *k <= 0.0) {
            return fail(format!("k = {:?} is not strictly decreasing and positive", self.k));
        }
        Ok(())
    }

    /// `w ⊙ l`, the signed weight vector used by the feature score.
    pub fn signed_weights(&self) -> Vec<f64> {
        self.w.iter().zip(&self.l).map(|(w, l)| w * f64::from(*l)).collect()
    }
}

/// Simulation parameters. The JSON form has exactly these fields.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    /// Node count.
    pub n: usize,
    /// Features per node.
    pub f: usize,
    /// Number of sDNAs (classes).
    pub y: usize,
    /// Longest walk length scored.
    pub q: usize,
    /// Exploration probability: chance that an unconnected pair is scored.
    pub p: f64,
    /// Fraction of unconnected pairs to connect per round.
    pub t: f64,
    /// Global popularity weight.
    pub r: f64,
    /// Global walk-length weights, length `q - 1`.
    pub c: Vec<f64>,
    /// Mutation intensity.
    pub z: f64,
    pub mutate_preference: bool,
    pub seed: u64,
}

impl SimConfig {
    /// Desk-scale profile: 200 nodes, 20 features, 4 sDNAs.
    pub fn desk() -> Self {
        SimConfig {
            n: 200,
            f: 20,
            y: 4,
            q: 4,
            p: 0.5,
            t: 0.0125,
            r: 0.05,
            c: vec![0.5, 0.25, 0.125],
            z: 0.1,
            mutate_preference: true,
            seed: 0,
        }
    }

    /// Full-scale profile: 1,000 nodes, 50 features, 4 sDNAs.
    pub fn full() -> Self {
        SimConfig {
            n: 1000,
            f: 50,
            t: 0.0025,
            ..SimConfig::desk()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let unit = |name: &str, v: f64| {
            if (0.0..=1.0).contains(&v) {
                Ok(())
            } else {
                Err(Error::invalid(format!("{name} = {v} outside [0,1]")))
            }
        };
        if self.n == 0 {
            return Err(Error::invalid("n must be positive"));
        }
        if self.y == 0 || self.y > self.n {
            return Err(Error::invalid(format!("y = {} must lie in 1..={}", self.y, self.n)));
        }
        if self.q < 2 {
            return Err(Error::invalid(format!("q = {} < 2", self.q)));
        }
        if self.c.len() + 1 != self.q {
            return Err(Error::invalid(format!(
                "c has {} entries, expected q - 1 = {}",
                self.c.len(),
                self.q - 1
            )));
        }
        unit("p", self.p)?;
        unit("t", self.t)?;
        unit("z", self.z)?;
        if !self.r.is_finite() || self.c.iter().any(|c| !c.is_finite()) {
            return Err(Error::invalid("r and c must be finite"));
        }
        Ok(())
    }
}

/// Stratified draw for the weight of walk length `length` (in `2..=q`):
/// uniform on `[(q-length+1)/q, (q-length+2)/q)`. Adjacent strata share a
/// boundary, so a vector of such draws is strictly decreasing.
pub(crate) fn sample_walk_weight(length: usize, q: usize, rng: &mut StreamRng) -> f64 {
    let qf = q as f64;
    let lo = (q - length + 1) as f64 / qf;
    let hi = (q - length + 2) as f64 / qf;
    rng.gen_range(lo..hi)
}

pub(crate) fn sample_sign(rng: &mut StreamRng) -> i8 {
    if rng.gen::<bool>() {
        1
    } else {
        -1
    }
}

fn sample_sdna(id: usize, cfg: &SimConfig, rng: &mut StreamRng) -> Sdna {
    let w = (0..cfg.f).map(|_| rng.gen::<f64>()).collect();
    let l = (0..cfg.f).map(|_| sample_sign(rng)).collect();
    let d = rng.gen::<f64>();
    let k = (2..=cfg.q).map(|x| sample_walk_weight(x, cfg.q, rng)).collect();
    Sdna { id, w, l, d, k }
}

/// sDNA id for `node`: equal contiguous blocks when `y` divides `n`,
/// round-robin otherwise.
pub fn assign_sdna(node: usize, n: usize, y: usize) -> usize {
    if n.is_multiple_of(y) {
        node / (n / y)
    } else {
        node % y
    }
}

/// Edgeless population with uniform `[0,1]` features and freshly drawn sDNAs.
pub fn generate_population(cfg: &SimConfig) -> Result<(SocialGraph, Vec<Sdna>)> {
    cfg.validate()?;
    let mut rng = rng::stream(cfg.seed, &["population".into()]);
    let features = Array2::from_shape_simple_fn((cfg.n, cfg.f), || rng.gen::<f64>());
    let sdnas = (0..cfg.y).map(|id| sample_sdna(id, cfg, &mut rng)).collect();
    let sdna_of = (0..cfg.n).map(|i| assign_sdna(i, cfg.n, cfg.y)).collect();
    let graph = SocialGraph::new(features, sdna_of)?;
    Ok((graph, sdnas))
}
