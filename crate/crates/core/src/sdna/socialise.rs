use std::cmp::Ordering;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{ScoringContext, Sdna, SimConfig};
use crate::error::Result;
use crate::exec::Execution;
use crate::graph::SocialGraph;
use crate::rng::StreamRng;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScoredPair {
    pub i: usize,
    pub j: usize,
    pub score: f64,
}

/// How many of the ranked pairs a round may connect.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum StopRule {
    /// `floor(t × |unconnected pairs|)` using the config's `t`.
    #[default]
    Fraction,
    /// A fixed number of connections (event-stream mode uses 1).
    Fixed(usize),
}

#[derive(Debug, Clone, Copy, Default)]
pub struct SocialiseOptions {
    pub stop: StopRule,
    pub exec: Execution,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SocialiseOutcome {
    /// Every scored pair, best first.
    pub scored: Vec<ScoredPair>,
    pub stopping_len: usize,
    /// The edges added this round, in connection order.
    pub connected: Vec<(usize, usize)>,
}

/// One link-formation round with the default stop rule.
pub fn socialise(
    graph: &mut SocialGraph,
    sdnas: &[Sdna],
    cfg: &SimConfig,
    rng: &mut StreamRng,
) -> Result<SocialiseOutcome> {
    socialise_with(graph, sdnas, cfg, rng, SocialiseOptions::default())
}

/// One link-formation round.
///
/// Each unconnected pair is selected for scoring with probability `p`; the
/// selection draws are made on `rng` in lexicographic pair order before any
/// scoring happens. Scored pairs are ranked by score (descending, ties broken
/// by pair order) and the top `min(stopping_len, scored)` become edges.
pub fn socialise_with(
    graph: &mut SocialGraph,
    sdnas: &[Sdna],
    cfg: &SimConfig,
    rng: &mut StreamRng,
    opts: SocialiseOptions,
) -> Result<SocialiseOutcome> {
    cfg.validate()?;
    let universe = graph.unconnected_pairs();
    let selected: Vec<(usize, usize)> = universe
        .pairs
        .iter()
        .copied()
        .filter(|_| rng.gen::<f64>() < cfg.p)
        .collect();

    let stopping_len = match opts.stop {
        StopRule::Fraction => (cfg.t * universe.len() as f64).floor() as usize,
        StopRule::Fixed(k) => k,
    };

    let mut scored = {
        let ctx = ScoringContext::new(graph, sdnas, cfg)?;
        opts.exec.map(&selected, |&(i, j)| ScoredPair {
            i,
            j,
            score: ctx.pair_score_unchecked(i, j),
        })
    };
    if let Some(bad) = scored.iter().find(|s| !s.score.is_finite()) {
        return Err(crate::Error::Internal(format!(
            "non-finite score for pair ({}, {})",
            bad.i, bad.j
        )));
    }
    // stable: equal scores keep lexicographic pair order
    scored.sort_by(|a, b| b.score.partial_cmp(&a.score).unwrap_or(Ordering::Equal));

    let connected: Vec<(usize, usize)> = scored.iter().take(stopping_len).map(|s| (s.i, s.j)).collect();
    for &(i, j) in &connected {
        graph.add_edge(i, j)?;
    }
    Ok(SocialiseOutcome {
        scored,
        stopping_len,
        connected,
    })
}
