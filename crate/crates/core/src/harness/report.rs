use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::run::{CellResult, ExperimentReport};
use super::CELL_FT;
use crate::error::{Error, Result};
use crate::sdna::output::write_json;

pub const REPORT_FILE: &str = "report.json";
pub const SUMMARY_FILE: &str = "summary.csv";
pub const BEST_FILE: &str = "best.csv";

fn mean_std(c: Option<&CellResult>, sep: (&str, &str)) -> String {
    match c.and_then(|c| c.mean.zip(c.std)) {
        Some((m, s)) => format!("{m:.3}{}{s:.3}{}", sep.0, sep.1),
        None => "failed".to_string(),
    }
}

/// Rows are snapshots, columns are cells, values are `mean±std`. With an
/// empty model grid only the header is written.
pub fn render_summary_csv(report: &ExperimentReport) -> String {
    let grid = &report.plan.model_grid;
    let mut out = String::from("snapshot");
    for cell in grid {
        out.push(',');
        out.push_str(&cell.name);
    }
    out.push('\n');
    if grid.is_empty() {
        return out;
    }
    for snap in &report.snapshots {
        out.push_str(&snap.name);
        for cell in &snap.cells {
            out.push(',');
            out.push_str(&mean_std(Some(cell), ("±", "")));
        }
        out.push('\n');
    }
    out
}

/// One row per snapshot: the `FTvanilla` score, the best score and the best
/// cell, e.g. `0-0, 0.721 (0.011), 0.732 (0.007), FTRPRauto`.
pub fn render_best_csv(report: &ExperimentReport) -> String {
    let mut out = String::from("snapshot, FTvanilla, best, best_cell\n");
    if report.plan.model_grid.is_empty() {
        return out;
    }
    for snap in &report.snapshots {
        let best = snap.best.as_deref().and_then(|b| snap.cell(b));
        let _ = writeln!(
            out,
            "{}, {}, {}, {}",
            snap.name,
            mean_std(snap.cell(CELL_FT), (" (", ")")),
            mean_std(best, (" (", ")")),
            snap.best.as_deref().unwrap_or("none"),
        );
    }
    out
}

/// Writes `report.json`, `summary.csv` and `best.csv` into `dir`.
pub fn emit_report(report: &ExperimentReport, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    write_json(&dir.join(REPORT_FILE), report)?;
    let summary = dir.join(SUMMARY_FILE);
    fs::write(&summary, render_summary_csv(report)).map_err(|e| Error::io(&summary, e))?;
    let best = dir.join(BEST_FILE);
    fs::write(&best, render_best_csv(report)).map_err(|e| Error::io(&best, e))
}

pub fn load_report(path: &Path) -> Result<ExperimentReport> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::Format {
        what: "report",
        path: path.to_path_buf(),
        detail: e.to_string(),
    })
}
