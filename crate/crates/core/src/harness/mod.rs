//! Cross-validated experiment grid over simulated snapshots.
//!
//! Every random choice is seeded from the plan seed plus a label path
//! (network, snapshot, cell name, fold), so a report does not depend on how
//! tasks were scheduled.

mod folds;
mod report;
mod run;

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

pub use folds::{make_folds, FoldMasks};
pub use report::{emit_report, load_report, render_best_csv, render_summary_csv, BEST_FILE, REPORT_FILE, SUMMARY_FILE};
pub use run::{
    check_hypothesis, hypothesis_holds, run_cell, run_experiment, run_experiment_with, CellResult, Dataset,
    ExperimentReport, Hypothesis, SnapshotResult,
};

use crate::error::{Error, Result};
use crate::gcn::{GcnConfig, Variant};
use crate::sdna::SimConfig;
use crate::similarity::{SimilarityKind, SimilaritySpec, Thresholds};

/// Cell names the hypothesis check looks up.
pub const CELL_FT: &str = "FTvanilla";
pub const CELL_F: &str = "F";
pub const CELL_T: &str = "T";
pub const CELL_TLR: &str = "TLR";

/// One named model of the grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelCell {
    pub name: String,
    /// `seed` and `num_classes` are filled in by the harness.
    #[serde(default)]
    pub gcn: GcnConfig,
    #[serde(default)]
    pub similarity: SimilaritySpec,
}

impl ModelCell {
    pub fn new(name: impl Into<String>, gcn: GcnConfig, similarity: SimilaritySpec) -> Self {
        ModelCell {
            name: name.into(),
            gcn,
            similarity,
        }
    }
}

/// Threshold settings tried for every similarity kind.
pub fn default_thresholds() -> [Thresholds; 4] {
    [
        Thresholds::Range { lo: 0.0, hi: 0.5 },
        Thresholds::Range { lo: 0.0, hi: 1.0 },
        Thresholds::Range { lo: 0.1, hi: 1.0 },
        Thresholds::Auto,
    ]
}

/// `[S]FT<kind><thresholds>`, e.g. `FTkatz0.0-0.5` or `SFTRPRauto`.
pub fn cell_name(use_s: bool, kind: SimilarityKind, thresholds: Option<Thresholds>) -> String {
    let s = if use_s { "S" } else { "" };
    match thresholds {
        Some(th) if kind != SimilarityKind::Adjacency => format!("{s}FT{}{th}", kind.tag()),
        _ => format!("{s}FT{}", kind.tag()),
    }
}

/// The baselines (`FTvanilla`, `SFTvanilla`, `F`, `T`, `TLR`) followed by
/// `FT` and `SFT` cells for every similarity kind and threshold setting.
pub fn default_grid(base: &GcnConfig) -> Vec<ModelCell> {
    let with = |variant: Variant, use_s: bool| GcnConfig {
        variant,
        use_s,
        ..base.clone()
    };
    let adj = SimilaritySpec::adjacency();
    let mut cells = vec![
        ModelCell::new(CELL_FT, with(Variant::FtVanilla, false), adj),
        ModelCell::new("SFTvanilla", with(Variant::FtVanilla, true), adj),
        ModelCell::new(CELL_F, with(Variant::F, false), adj),
        ModelCell::new(CELL_T, with(Variant::T, false), adj),
        ModelCell::new(CELL_TLR, with(Variant::Tlr, false), adj),
    ];
    for kind in [SimilarityKind::Katz, SimilarityKind::Rpr, SimilarityKind::Gg] {
        for th in default_thresholds() {
            for use_s in [false, true] {
                cells.push(ModelCell::new(
                    cell_name(use_s, kind, Some(th)),
                    with(Variant::FtVanilla, use_s),
                    SimilaritySpec::of(kind, th),
                ));
            }
        }
    }
    cells
}

fn default_folds() -> usize {
    10
}

fn default_model_grid() -> Vec<ModelCell> {
    default_grid(&GcnConfig::default())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentPlan {
    /// Simulator settings; `seed` is replaced per network.
    pub sim: SimConfig,
    pub networks: usize,
    pub snapshots: usize,
    #[serde(default = "default_model_grid")]
    pub model_grid: Vec<ModelCell>,
    #[serde(default = "default_folds")]
    pub folds: usize,
    pub seed: u64,
}

impl ExperimentPlan {
    /// 3 networks x 3 snapshots of the desk-scale simulator, full grid.
    pub fn desk(seed: u64) -> Self {
        ExperimentPlan {
            sim: SimConfig::desk(),
            networks: 3,
            snapshots: 3,
            model_grid: default_model_grid(),
            folds: default_folds(),
            seed,
        }
    }

    /// 10 networks x 3 snapshots at 1,000 nodes.
    pub fn full(seed: u64) -> Self {
        ExperimentPlan {
            sim: SimConfig::full(),
            networks: 10,
            snapshots: 3,
            ..ExperimentPlan::desk(seed)
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.sim.validate()?;
        if self.networks == 0 || self.snapshots == 0 {
            return Err(Error::invalid("networks and snapshots must be at least 1"));
        }
        if self.folds < 2 {
            return Err(Error::invalid(format!("folds = {} must be at least 2", self.folds)));
        }
        let mut seen = HashSet::new();
        for cell in &self.model_grid {
            if !seen.insert(cell.name.as_str()) {
                return Err(Error::invalid(format!("duplicate cell name {:?}", cell.name)));
            }
            self.cell_config(cell, 0).validate()?;
            cell.similarity.validate()?;
        }
        Ok(())
    }

    /// The cell's training config with the class count and seed filled in.
    pub(crate) fn cell_config(&self, cell: &ModelCell, seed: u64) -> GcnConfig {
        GcnConfig {
            num_classes: self.sim.y,
            seed,
            ..cell.gcn.clone()
        }
    }

    /// `SimConfig` of network `k`.
    pub fn network_config(&self, k: usize) -> SimConfig {
        SimConfig {
            seed: crate::rng::derive_seed(self.seed, &["network".into(), k.into()]),
            ..self.sim.clone()
        }
    }
}
