//! On-disk layout for simulated datasets and event streams.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{EdgeEvent, Sdna, SimConfig, Snapshot};
use crate::error::{Error, Result};
use crate::graph::io::write_graph_dir;

pub const SDNA_FILE: &str = "sdna.json";
pub const META_FILE: &str = "meta.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnapshotMeta {
    pub config: SimConfig,
    pub seed: u64,
    pub snapshot_index: usize,
    pub edges: usize,
    pub scored_pairs: usize,
    pub added_edges: usize,
}

pub fn snapshot_dir_name(index: usize) -> String {
    format!("snap-{index:03}")
}

/// Writes `snap-000/ … snap-k/`, each holding the graph files plus
/// `sdna.json` and `meta.json`. Returns the directories written.
pub fn write_snapshots(dir: &Path, cfg: &SimConfig, snapshots: &[Snapshot]) -> Result<Vec<PathBuf>> {
    let mut written = Vec::with_capacity(snapshots.len());
    for snap in snapshots {
        let sub = dir.join(snapshot_dir_name(snap.graph.snapshot_index()));
        write_graph_dir(&snap.graph, &sub)?;
        write_json(&sub.join(SDNA_FILE), &snap.sdnas)?;
        let meta = SnapshotMeta {
            config: cfg.clone(),
            seed: cfg.seed,
            snapshot_index: snap.graph.snapshot_index(),
            edges: snap.graph.edge_count(),
            scored_pairs: snap.scored_pairs,
            added_edges: snap.added_edges,
        };
        write_json(&sub.join(META_FILE), &meta)?;
        written.push(sub);
    }
    Ok(written)
}

pub fn read_sdnas(path: &Path) -> Result<Vec<Sdna>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(serde_json::from_str(&text)?)
}

/// `timestamp<TAB>i<TAB>j` per line.
pub fn write_events(path: &Path, events: &[EdgeEvent]) -> Result<()> {
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    for e in events {
        writeln!(out, "{}\t{}\t{}", e.timestamp, e.i, e.j).map_err(|err| Error::io(path, err))?;
    }
    out.flush().map_err(|e| Error::io(path, e))
}

pub(crate) fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).map_err(|e| Error::io(path, e))
}
