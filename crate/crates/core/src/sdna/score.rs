//! Pairwise connection scores.
//!
//! `s = Φ + r·Δ + cᵀΠ` where Φ is the two-way feature score, Δ the two-way
//! popularity score and Π the vector of walk-length scores.

use ndarray::ArrayView1;

use super::{Sdna, SimConfig};
use crate::error::{Error, Result};
use crate::graph::{SocialGraph, WalkIndicators};

/// One-way feature score `|f_i − f_j|ᵀ (w ⊙ l)` from the evaluating node's sDNA.
pub fn feature_score_one_way(fi: ArrayView1<f64>, fj: ArrayView1<f64>, sdna: &Sdna) -> Result<f64> {
    if fi.len() != fj.len() || fi.len() != sdna.w.len() || sdna.l.len() != sdna.w.len() {
        return Err(Error::invalid(format!(
            "feature length mismatch: {} / {} / sDNA {}",
            fi.len(),
            fj.len(),
            sdna.w.len()
        )));
    }
    Ok(fi
        .iter()
        .zip(fj.iter())
        .zip(sdna.w.iter().zip(&sdna.l))
        .map(|((a, b), (w, l))| (a - b).abs() * w * f64::from(*l))
        .sum())
}

/// Scoring state frozen at the start of a socialise round: degrees and walk
/// indicators do not change while pairs are being scored.
#[derive(Debug, Clone)]
pub struct ScoringContext<'a> {
    graph: &'a SocialGraph,
    sdnas: &'a [Sdna],
    signed: Vec<Vec<f64>>,
    degrees: Vec<usize>,
    walks: WalkIndicators,
    r: f64,
    c: Vec<f64>,
}

impl<'a> ScoringContext<'a> {
    pub fn new(graph: &'a SocialGraph, sdnas: &'a [Sdna], cfg: &SimConfig) -> Result<Self> {
        Self::with_weights(graph, sdnas, cfg.q, cfg.r, cfg.c.clone())
    }

    pub fn with_weights(graph: &'a SocialGraph, sdnas: &'a [Sdna], q: usize, r: f64, c: Vec<f64>) -> Result<Self> {
        if q < 2 {
            return Err(Error::invalid(format!("q = {q} < 2")));
        }
        if c.len() + 1 != q {
            return Err(Error::invalid(format!("c has {} entries for q = {q}", c.len())));
        }
        let f = graph.feature_count();
        for (pos, s) in sdnas.iter().enumerate() {
            if s.id != pos {
                return Err(Error::invalid(format!("sDNA at position {pos} has id {}", s.id)));
            }
            s.check(f, q)?;
        }
        if let Some(bad) = graph.sdna_of().iter().find(|id| **id >= sdnas.len()) {
            return Err(Error::invalid(format!("node subscribes to unknown sDNA {bad}")));
        }
        Ok(ScoringContext {
            graph,
            sdnas,
            signed: sdnas.iter().map(Sdna::signed_weights).collect(),
            degrees: graph.degrees(),
            walks: WalkIndicators::new(graph.adjacency(), q),
            r,
            c,
        })
    }

    fn check_pair(&self, i: usize, j: usize) -> Result<()> {
        let n = self.graph.node_count();
        if i >= n || j >= n {
            return Err(Error::invalid(format!("pair ({i}, {j}) out of range for {n} nodes")));
        }
        if i == j {
            return Err(Error::invalid(format!("pair ({i}, {i}) is a self-pair")));
        }
        Ok(())
    }

    fn sdna(&self, node: usize) -> &'a Sdna {
        &self.sdnas[self.graph.sdna_of()[node]]
    }

    /// Φ_{i↔j} = Φ_{i→j} + Φ_{j→i}.
    pub fn feature_score(&self, i: usize, j: usize) -> Result<f64> {
        self.check_pair(i, j)?;
        Ok(self.feature_score_unchecked(i, j))
    }

    fn feature_score_unchecked(&self, i: usize, j: usize) -> f64 {
        let x = self.graph.features();
        let wi = &self.signed[self.graph.sdna_of()[i]];
        let wj = &self.signed[self.graph.sdna_of()[j]];
        // Φ_{i→j} and Φ_{j→i} are accumulated separately so the sum matches
        // the one-way definition term for term.
        let (mut ij, mut ji) = (0.0, 0.0);
        for (m, (a, b)) in x.row(i).iter().zip(x.row(j).iter()).enumerate() {
            let diff = (a - b).abs();
            ij += diff * wi[m];
            ji += diff * wj[m];
        }
        ij + ji
    }

    /// Δ_{i↔j} = m_j·d_i + m_i·d_j with degrees frozen at construction.
    pub fn popularity_score(&self, i: usize, j: usize) -> Result<f64> {
        self.check_pair(i, j)?;
        Ok(self.popularity_score_unchecked(i, j))
    }

    fn popularity_score_unchecked(&self, i: usize, j: usize) -> f64 {
        self.degrees[j] as f64 * self.sdna(i).d + self.degrees[i] as f64 * self.sdna(j).d
    }

    /// Π_{i↔j}: entry `x − 2` is `[A^x[i,j]]·(k_{i,x} + k_{j,x})` for `x = 2..=q`.
    pub fn path_score(&self, i: usize, j: usize) -> Result<Vec<f64>> {
        self.check_pair(i, j)?;
        let (ki, kj) = (&self.sdna(i).k, &self.sdna(j).k);
        Ok((2..=self.walks.max_length())
            .map(|x| {
                if self.walks.exists(i, j, x) {
                    ki[x - 2] + kj[x - 2]
                } else {
                    0.0
                }
            })
            .collect())
    }

    fn weighted_path_score_unchecked(&self, i: usize, j: usize) -> f64 {
        let (ki, kj) = (&self.sdna(i).k, &self.sdna(j).k);
        let mut total = 0.0;
        for x in 2..=self.walks.max_length() {
            if self.walks.exists(i, j, x) {
                total += self.c[x - 2] * (ki[x - 2] + kj[x - 2]);
            }
        }
        total
    }

    /// Final score `Φ + r·Δ + cᵀΠ`.
    pub fn pair_score(&self, i: usize, j: usize) -> Result<f64> {
        self.check_pair(i, j)?;
        Ok(self.pair_score_unchecked(i, j))
    }

    pub(crate) fn pair_score_unchecked(&self, i: usize, j: usize) -> f64 {
        self.feature_score_unchecked(i, j)
            + self.r * self.popularity_score_unchecked(i, j)
            + self.weighted_path_score_unchecked(i, j)
    }
}

/// Φ_{i↔j} on the current graph.
pub fn feature_score(i: usize, j: usize, graph: &SocialGraph, sdnas: &[Sdna]) -> Result<f64> {
    let q = sdnas.first().map_or(2, |s| s.k.len() + 1);
    ScoringContext::with_weights(graph, sdnas, q, 0.0, vec![0.0; q - 1])?.feature_score(i, j)
}

/// Δ_{i↔j} on the current graph.
pub fn popularity_score(i: usize, j: usize, graph: &SocialGraph, sdnas: &[Sdna]) -> Result<f64> {
    let q = sdnas.first().map_or(2, |s| s.k.len() + 1);
    ScoringContext::with_weights(graph, sdnas, q, 0.0, vec![0.0; q - 1])?.popularity_score(i, j)
}

/// Π_{i↔j} on the current graph, with `q` taken from the sDNAs' `k` length.
pub fn path_score(i: usize, j: usize, graph: &SocialGraph, sdnas: &[Sdna]) -> Result<Vec<f64>> {
    let q = sdnas.first().map_or(2, |s| s.k.len() + 1);
    ScoringContext::with_weights(graph, sdnas, q, 0.0, vec![0.0; q - 1])?.path_score(i, j)
}

pub fn pair_score(i: usize, j: usize, graph: &SocialGraph, sdnas: &[Sdna], cfg: &SimConfig) -> Result<f64> {
    ScoringContext::new(graph, sdnas, cfg)?.pair_score(i, j)
}
