//! Plain-text graph files: `edges.tsv`, `features.csv`, `labels.csv`.
//!
//! * `edges.tsv`: one `i<TAB>j` per line with `i < j`
//! * `features.csv`: headerless, one row per node
//! * `labels.csv`: `node,sdna_id` rows, no header
//!
//! All indices are 0-based.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use ndarray::Array2;

use super::SocialGraph;
use crate::error::{Error, Result};

pub const EDGES_FILE: &str = "edges.tsv";
pub const FEATURES_FILE: &str = "features.csv";
pub const LABELS_FILE: &str = "labels.csv";

pub fn write_graph_dir(graph: &SocialGraph, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;

    let path = dir.join(EDGES_FILE);
    let file = fs::File::create(&path).map_err(|e| Error::io(&path, e))?;
    let mut out = BufWriter::new(file);
    for (i, j) in graph.edges() {
        writeln!(out, "{i}\t{j}").map_err(|e| Error::io(&path, e))?;
    }
    out.flush().map_err(|e| Error::io(&path, e))?;

    let path = dir.join(FEATURES_FILE);
    let mut w = csv::WriterBuilder::new().has_headers(false).from_path(&path)?;
    for row in graph.features().rows() {
        w.write_record(row.iter().map(|v| v.to_string()))?;
    }
    w.flush().map_err(|e| Error::io(&path, e))?;

    let path = dir.join(LABELS_FILE);
    let mut w = csv::WriterBuilder::new().has_headers(false).from_path(&path)?;
    for (node, id) in graph.sdna_of().iter().enumerate() {
        w.write_record([node.to_string(), id.to_string()])?;
    }
    w.flush().map_err(|e| Error::io(&path, e))?;
    Ok(())
}

pub fn read_graph_dir(dir: &Path) -> Result<SocialGraph> {
    let labels = read_labels(&dir.join(LABELS_FILE))?;
    let n = labels.len();
    let features = read_features(&dir.join(FEATURES_FILE), n)?;
    let mut graph = SocialGraph::new(features, labels)?;

    let path = dir.join(EDGES_FILE);
    let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    for (lineno, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let bad = |detail: String| Error::Format {
            what: "edge list",
            path: path.clone(),
            detail: format!("line {}: {detail}", lineno + 1),
        };
        let mut parts = line.split('\t');
        let (Some(a), Some(b), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(bad("expected two tab-separated fields".into()));
        };
        let i: usize = a.trim().parse().map_err(|e| bad(format!("{e}")))?;
        let j: usize = b.trim().parse().map_err(|e| bad(format!("{e}")))?;
        graph.add_edge(i, j).map_err(|e| bad(e.to_string()))?;
    }
    Ok(graph)
}

fn read_labels(path: &Path) -> Result<Vec<usize>> {
    let mut r = csv::ReaderBuilder::new().has_headers(false).from_path(path)?;
    let mut labels = Vec::new();
    for (row, rec) in r.records().enumerate() {
        let rec = rec?;
        let bad = |detail: String| Error::Format {
            what: "labels",
            path: path.to_path_buf(),
            detail: format!("row {}: {detail}", row + 1),
        };
        if rec.len() != 2 {
            return Err(bad(format!("expected 2 fields, got {}", rec.len())));
        }
        let node: usize = rec[0].trim().parse().map_err(|e| bad(format!("{e}")))?;
        let id: usize = rec[1].trim().parse().map_err(|e| bad(format!("{e}")))?;
        if node != row {
            return Err(bad(format!("node {node} out of order")));
        }
        labels.push(id);
    }
    Ok(labels)
}

fn read_features(path: &Path, n: usize) -> Result<Array2<f64>> {
    let mut r = csv::ReaderBuilder::new().has_headers(false).from_path(path)?;
    let mut values = Vec::new();
    let mut cols = None;
    let mut rows = 0;
    for rec in r.records() {
        let rec = rec?;
        // a node without features is written as an empty line
        let width = if rec.len() == 1 && rec[0].trim().is_empty() {
            0
        } else {
            rec.len()
        };
        let bad = |detail: String| Error::Format {
            what: "features",
            path: path.to_path_buf(),
            detail: format!("row {}: {detail}", rows + 1),
        };
        match cols {
            None => cols = Some(width),
            Some(c) if c != width => return Err(bad(format!("expected {c} columns, got {width}"))),
            _ => {}
        }
        for field in rec.iter().take(width) {
            values.push(field.trim().parse::<f64>().map_err(|e| bad(format!("{e}")))?);
        }
        rows += 1;
    }
    if rows != n {
        return Err(Error::Format {
            what: "features",
            path: path.to_path_buf(),
            detail: format!("{rows} rows for {n} labelled nodes"),
        });
    }
    Array2::from_shape_vec((rows, cols.unwrap_or(0)), values).map_err(|e| Error::Internal(e.to_string()))
}
