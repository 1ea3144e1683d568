use std::collections::HashMap;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use super::folds::{make_folds, FoldMasks};
use super::{ExperimentPlan, ModelCell, CELL_F, CELL_FT, CELL_T, CELL_TLR};
use crate::error::Result;
use crate::exec::Execution;
use crate::gcn::{evaluate, train_with, TrainInputs, TrainOptions};
use crate::graph::SocialGraph;
use crate::rng::derive_seed;
use crate::sdna::run_dynamic;
use crate::similarity::{build_representative, GraphRepresentative};

/// One snapshot of one simulated network.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub network: usize,
    pub snapshot: usize,
    pub graph: SocialGraph,
}

impl Dataset {
    /// `<network>-<snapshot>`, e.g. `0-0` for the first network's first snapshot.
    pub fn name(&self) -> String {
        format!("{}-{}", self.network, self.snapshot)
    }

    pub fn labels(&self) -> &[usize] {
        self.graph.sdna_of()
    }

    pub fn features(&self) -> &Array2<f64> {
        self.graph.features()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellResult {
    pub name: String,
    /// Test accuracy per fold, in fold order. Empty when the cell failed.
    pub fold_accuracies: Vec<f64>,
    pub mean: Option<f64>,
    /// Population standard deviation over the folds.
    pub std: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl CellResult {
    fn from_folds(name: &str, folds: Vec<std::result::Result<f64, String>>) -> Self {
        let mut accs = Vec::with_capacity(folds.len());
        for (k, r) in folds.into_iter().enumerate() {
            match r {
                Ok(a) => accs.push(a),
                Err(e) => return CellResult::failed(name, format!("fold {k}: {e}")),
            }
        }
        let n = accs.len() as f64;
        let mean = accs.iter().sum::<f64>() / n;
        let var = accs.iter().map(|a| (a - mean) * (a - mean)).sum::<f64>() / n;
        CellResult {
            name: name.to_string(),
            fold_accuracies: accs,
            mean: Some(mean),
            std: Some(var.sqrt()),
            error: None,
        }
    }

    fn failed(name: &str, error: String) -> Self {
        CellResult {
            name: name.to_string(),
            fold_accuracies: Vec::new(),
            mean: None,
            std: None,
            error: Some(error),
        }
    }

    pub fn is_ok(&self) -> bool {
        self.error.is_none()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Hypothesis {
    Holds,
    Fails,
    /// One of the four reference cells is missing or failed.
    Indeterminate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnapshotResult {
    pub name: String,
    pub network: usize,
    pub snapshot: usize,
    pub edges: usize,
    /// Results in model-grid order.
    pub cells: Vec<CellResult>,
    /// Highest-mean cell; the first one wins ties.
    pub best: Option<String>,
    pub hypothesis: Hypothesis,
}

impl SnapshotResult {
    pub fn cell(&self, name: &str) -> Option<&CellResult> {
        self.cells.iter().find(|c| c.name == name)
    }

    pub fn mean_of(&self, name: &str) -> Option<f64> {
        self.cell(name).and_then(|c| c.mean)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub plan: ExperimentPlan,
    pub snapshots: Vec<SnapshotResult>,
}

impl ExperimentReport {
    pub fn failed_cells(&self) -> usize {
        self.snapshots
            .iter()
            .flat_map(|s| &s.cells)
            .filter(|c| !c.is_ok())
            .count()
    }

    pub fn hypothesis_holds_count(&self) -> usize {
        self.snapshots
            .iter()
            .filter(|s| s.hypothesis == Hypothesis::Holds)
            .count()
    }

    /// Highest-mean cell of a snapshot among the grid cells accepted by `keep`.
    pub fn best_cell_where(&self, snapshot: usize, keep: impl Fn(&ModelCell) -> bool) -> Option<&CellResult> {
        let snap = self.snapshots.get(snapshot)?;
        let mut best: Option<&CellResult> = None;
        for (cell, res) in self.plan.model_grid.iter().zip(&snap.cells) {
            if !keep(cell) {
                continue;
            }
            if let Some(m) = res.mean {
                if best.and_then(|b| b.mean).is_none_or(|bm| m > bm) {
                    best = Some(res);
                }
            }
        }
        best
    }
}

/// The integration predicate on mean accuracies:
/// `FT > F` and (`FT > T` or `FT > TLR`).
pub fn hypothesis_holds(ft: f64, f: f64, t: f64, tlr: f64) -> bool {
    ft > f && (ft > t || ft > tlr)
}

pub fn check_hypothesis(snapshot: &SnapshotResult) -> Hypothesis {
    let means = [CELL_FT, CELL_F, CELL_T, CELL_TLR].map(|n| snapshot.mean_of(n));
    match means {
        [Some(ft), Some(f), Some(t), Some(tlr)] => {
            if hypothesis_holds(ft, f, t, tlr) {
                Hypothesis::Holds
            } else {
                Hypothesis::Fails
            }
        }
        _ => Hypothesis::Indeterminate,
    }
}

fn best_cell(cells: &[CellResult]) -> Option<String> {
    let mut best: Option<&CellResult> = None;
    for c in cells {
        if let Some(m) = c.mean {
            if best.and_then(|b| b.mean).is_none_or(|bm| m > bm) {
                best = Some(c);
            }
        }
    }
    best.map(|c| c.name.clone())
}

fn fold_seed(plan: &ExperimentPlan, data: &Dataset, cell: &str, fold: usize) -> u64 {
    derive_seed(
        plan.seed,
        &[data.network.into(), data.snapshot.into(), cell.into(), fold.into()],
    )
}

fn folds_for(plan: &ExperimentPlan, data: &Dataset) -> Result<Vec<FoldMasks>> {
    let seed = derive_seed(plan.seed, &[data.network.into(), data.snapshot.into(), "folds".into()]);
    make_folds(data.labels(), plan.folds, seed)
}

fn train_fold(
    plan: &ExperimentPlan,
    data: &Dataset,
    cell: &ModelCell,
    rep: &GraphRepresentative,
    fold: &FoldMasks,
    k: usize,
) -> std::result::Result<f64, String> {
    let cfg = plan.cell_config(cell, fold_seed(plan, data, &cell.name, k));
    let inputs =
        TrainInputs::new(rep, data.features(), data.labels(), &fold.train, &fold.test).map_err(|e| e.to_string())?;
    let options = TrainOptions {
        track_test_accuracy: false,
    };
    let (model, _) = train_with(&inputs, &cfg, options).map_err(|e| e.to_string())?;
    evaluate(&model, &inputs).map_err(|e| e.to_string())
}

fn representative_for(data: &Dataset, cell: &ModelCell) -> Result<GraphRepresentative> {
    if cell.gcn.variant.uses_topology() {
        build_representative(&data.graph, &cell.similarity)
    } else {
        Ok(GraphRepresentative::identity(data.graph.node_count()))
    }
}

/// Trains one cell on every fold of one snapshot.
pub fn run_cell(
    plan: &ExperimentPlan,
    data: &Dataset,
    cell: &ModelCell,
    folds: &[FoldMasks],
    exec: Execution,
) -> CellResult {
    let rep = match representative_for(data, cell) {
        Ok(r) => r,
        Err(e) => return CellResult::failed(&cell.name, format!("representative: {e}")),
    };
    let results = exec.map_range(folds.len(), |k| train_fold(plan, data, cell, &rep, &folds[k], k));
    CellResult::from_folds(&cell.name, results)
}

fn run_snapshot(plan: &ExperimentPlan, data: &Dataset, exec: Execution) -> Result<SnapshotResult> {
    let folds = folds_for(plan, data)?;

    // one representative per distinct spec, shared by every cell that uses it
    let mut keys: Vec<String> = Vec::new();
    let mut owner: Vec<usize> = Vec::new();
    let mut slot_of_cell = Vec::with_capacity(plan.model_grid.len());
    let mut index: HashMap<String, usize> = HashMap::new();
    for (c, cell) in plan.model_grid.iter().enumerate() {
        let key = if cell.gcn.variant.uses_topology() {
            cell.similarity.cache_key()
        } else {
            "identity".to_string()
        };
        let slot = *index.entry(key.clone()).or_insert_with(|| {
            keys.push(key);
            owner.push(c);
            keys.len() - 1
        });
        slot_of_cell.push(slot);
    }
    let reps: Vec<std::result::Result<GraphRepresentative, String>> = exec.map(&owner, |&c| {
        representative_for(data, &plan.model_grid[c]).map_err(|e| format!("representative: {e}"))
    });

    let tasks: Vec<(usize, usize)> = (0..plan.model_grid.len())
        .flat_map(|c| (0..folds.len()).map(move |k| (c, k)))
        .collect();
    let mut outcomes = exec
        .map(&tasks, |&(c, k)| match &reps[slot_of_cell[c]] {
            Ok(rep) => train_fold(plan, data, &plan.model_grid[c], rep, &folds[k], k),
            Err(e) => Err(e.clone()),
        })
        .into_iter();

    let cells: Vec<CellResult> = plan
        .model_grid
        .iter()
        .map(|cell| {
            let per_fold: Vec<_> = outcomes.by_ref().take(folds.len()).collect();
            CellResult::from_folds(&cell.name, per_fold)
        })
        .collect();

    let mut result = SnapshotResult {
        name: data.name(),
        network: data.network,
        snapshot: data.snapshot,
        edges: data.graph.edge_count(),
        best: best_cell(&cells),
        cells,
        hypothesis: Hypothesis::Indeterminate,
    };
    result.hypothesis = check_hypothesis(&result);
    Ok(result)
}

pub fn run_experiment(plan: &ExperimentPlan) -> Result<ExperimentReport> {
    run_experiment_with(plan, Execution::default(), |_| {})
}

/// Runs the whole plan. Snapshots are processed in order; within a snapshot
/// every (cell, fold) pair is an independent task. `on_snapshot` sees each
/// snapshot result as soon as it is complete.
pub fn run_experiment_with(
    plan: &ExperimentPlan,
    exec: Execution,
    mut on_snapshot: impl FnMut(&SnapshotResult),
) -> Result<ExperimentReport> {
    plan.validate()?;
    let networks = exec.map_range(plan.networks, |k| run_dynamic(&plan.network_config(k), plan.snapshots));
    let mut snapshots = Vec::with_capacity(plan.networks * plan.snapshots);
    for (k, net) in networks.into_iter().enumerate() {
        for (s, snap) in net?.into_iter().enumerate() {
            let data = Dataset {
                network: k,
                snapshot: s,
                graph: snap.graph,
            };
            let result = run_snapshot(plan, &data, exec)?;
            on_snapshot(&result);
            snapshots.push(result);
        }
    }
    Ok(ExperimentReport {
        plan: plan.clone(),
        snapshots,
    })
}
