use serde::{Deserialize, Serialize};

use super::{generate_population, mutate, socialise, socialise_with, Sdna, SimConfig, SocialiseOptions, StopRule};
use crate::error::{Error, Result};
use crate::graph::SocialGraph;
use crate::rng;

/// Consecutive rounds that may score nothing before an event stream gives up.
pub const EVENT_RETRY_LIMIT: usize = 64;

/// Network state after one socialise round.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub graph: SocialGraph,
    /// sDNAs in force when this snapshot's round ran.
    pub sdnas: Vec<Sdna>,
    pub scored_pairs: usize,
    pub added_edges: usize,
}

/// Snapshot 0 socialises a fresh population; every later snapshot mutates the
/// sDNAs and socialises the pairs that are still unconnected.
pub fn run_dynamic(cfg: &SimConfig, snapshots: usize) -> Result<Vec<Snapshot>> {
    if snapshots == 0 {
        return Err(Error::invalid("at least one snapshot is required"));
    }
    let (mut graph, mut sdnas) = generate_population(cfg)?;
    let mut out = Vec::with_capacity(snapshots);
    for s in 0..snapshots {
        if s > 0 {
            let mut mrng = rng::stream(cfg.seed, &["mutate".into(), s.into()]);
            mutate(&mut sdnas, cfg, &mut mrng)?;
        }
        let mut srng = rng::stream(cfg.seed, &["socialise".into(), s.into()]);
        let outcome = socialise(&mut graph, &sdnas, cfg, &mut srng)?;
        graph.set_snapshot_index(s);
        out.push(Snapshot {
            graph: graph.clone(),
            sdnas: sdnas.clone(),
            scored_pairs: outcome.scored.len(),
            added_edges: outcome.connected.len(),
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeEvent {
    pub timestamp: usize,
    pub i: usize,
    pub j: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EventStream {
    pub events: Vec<EdgeEvent>,
    pub requested: usize,
    /// True when the stream ended early because no further edge could form.
    pub saturated: bool,
    pub final_sdnas: Vec<Sdna>,
}

/// Timestamped edge stream: each round connects exactly one pair, and the
/// sDNAs are mutated with intensity `z` between rounds. A round that scores
/// nothing is retried without advancing the clock; after
/// [`EVENT_RETRY_LIMIT`] empty rounds, or once every pair is connected, the
/// stream ends early.
pub fn emit_event_stream(cfg: &SimConfig, events: usize) -> Result<EventStream> {
    if events == 0 {
        return Err(Error::invalid("at least one event is required"));
    }
    let (mut graph, mut sdnas) = generate_population(cfg)?;
    let mut out = Vec::with_capacity(events);
    let mut attempt = 0usize;
    let mut failures = 0usize;
    let opts = SocialiseOptions {
        stop: StopRule::Fixed(1),
        ..Default::default()
    };
    let mut saturated = false;
    while out.len() < events {
        if graph.unconnected_pairs().is_empty() || failures >= EVENT_RETRY_LIMIT {
            saturated = true;
            break;
        }
        let mut srng = rng::stream(cfg.seed, &["event".into(), attempt.into()]);
        attempt += 1;
        let outcome = socialise_with(&mut graph, &sdnas, cfg, &mut srng, opts)?;
        let Some(&(i, j)) = outcome.connected.first() else {
            failures += 1;
            continue;
        };
        failures = 0;
        let timestamp = out.len();
        out.push(EdgeEvent { timestamp, i, j });
        let mut mrng = rng::stream(cfg.seed, &["event-mutate".into(), timestamp.into()]);
        mutate(&mut sdnas, cfg, &mut mrng)?;
    }
    Ok(EventStream {
        events: out,
        requested: events,
        saturated,
        final_sdnas: sdnas,
    })
}
