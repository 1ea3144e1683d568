use proptest::prelude::*;

use socsim_core::exec::Execution;
use socsim_core::gcn::GcnConfig;
use socsim_core::harness::{
    default_grid, emit_report, hypothesis_holds, load_report, make_folds, render_summary_csv, run_experiment_with,
    ExperimentPlan, ExperimentReport, Hypothesis, CELL_F, CELL_FT, CELL_T, CELL_TLR, REPORT_FILE,
};
use socsim_core::sdna::SimConfig;

fn tiny_plan(seed: u64) -> ExperimentPlan {
    let base = GcnConfig {
        epochs: 30,
        ..GcnConfig::default()
    };
    let keep = [CELL_FT, CELL_F, CELL_T, CELL_TLR, "SFTkatz0.0-0.5", "FTGGauto"];
    ExperimentPlan {
        sim: SimConfig {
            n: 48,
            f: 6,
            t: 0.03,
            ..SimConfig::desk()
        },
        networks: 1,
        snapshots: 2,
        model_grid: default_grid(&base)
            .into_iter()
            .filter(|c| keep.contains(&c.name.as_str()))
            .collect(),
        folds: 4,
        seed,
    }
}

fn tiny_report() -> &'static ExperimentReport {
    static REPORT: std::sync::OnceLock<ExperimentReport> = std::sync::OnceLock::new();
    REPORT.get_or_init(|| run_experiment_with(&tiny_plan(17), Execution::Parallel, |_| {}).unwrap())
}

#[test]
fn cell_statistics_recompute_from_fold_accuracies() {
    let report = tiny_report();
    assert_eq!(report.snapshots.len(), 2);
    for snap in &report.snapshots {
        assert_eq!(snap.cells.len(), 6);
        for cell in &snap.cells {
            assert!(cell.is_ok(), "{}: {:?}", cell.name, cell.error);
            assert_eq!(cell.fold_accuracies.len(), 4);
            let n = 4.0;
            let mean: f64 = cell.fold_accuracies.iter().sum::<f64>() / n;
            let var = cell.fold_accuracies.iter().map(|a| (a - mean).powi(2)).sum::<f64>() / n;
            assert!((cell.mean.unwrap() - mean).abs() < 1e-12);
            assert!((cell.std.unwrap() - var.sqrt()).abs() < 1e-12);
            // 12 test nodes per fold
            for a in &cell.fold_accuracies {
                assert!(((a * 12.0).round() - a * 12.0).abs() < 1e-9);
            }
        }
        let top = snap
            .cells
            .iter()
            .map(|c| c.mean.unwrap())
            .fold(f64::NEG_INFINITY, f64::max);
        let first_top = snap.cells.iter().find(|c| c.mean.unwrap() == top).unwrap();
        assert_eq!(snap.best.as_deref(), Some(first_top.name.as_str()));
        let m = |name| snap.mean_of(name).unwrap();
        let expected = if hypothesis_holds(m(CELL_FT), m(CELL_F), m(CELL_T), m(CELL_TLR)) {
            Hypothesis::Holds
        } else {
            Hypothesis::Fails
        };
        assert_eq!(snap.hypothesis, expected);
    }
}

#[test]
fn summary_values_come_from_the_report() {
    let report = tiny_report();
    let csv = render_summary_csv(report);
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(header[0], "snapshot");
    for (line, snap) in lines.zip(&report.snapshots) {
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(fields[0], snap.name);
        for (field, name) in fields[1..].iter().zip(&header[1..]) {
            let (mean, std) = field.split_once('±').unwrap();
            let cell = snap.cell(name).unwrap();
            assert!((mean.parse::<f64>().unwrap() - cell.mean.unwrap()).abs() <= 5e-4 + 1e-12);
            assert!((std.parse::<f64>().unwrap() - cell.std.unwrap()).abs() <= 5e-4 + 1e-12);
        }
    }
}

#[test]
fn report_round_trips_through_json() {
    let dir = tempfile::tempdir().unwrap();
    emit_report(tiny_report(), dir.path()).unwrap();
    assert_eq!(&load_report(&dir.path().join(REPORT_FILE)).unwrap(), tiny_report());
}

#[test]
fn sequential_run_reproduces_the_parallel_report() {
    let seq = run_experiment_with(&tiny_plan(17), Execution::Sequential, |_| {}).unwrap();
    assert_eq!(&seq, tiny_report());
}

#[test]
fn plan_json_rejects_unknown_fields_and_fills_defaults() {
    let mut v = serde_json::to_value(ExperimentPlan::desk(1)).unwrap();
    let obj = v.as_object_mut().unwrap();
    obj.remove("model_grid");
    obj.remove("folds");
    let plan: ExperimentPlan = serde_json::from_value(v.clone()).unwrap();
    assert_eq!(plan, ExperimentPlan::desk(1));
    v.as_object_mut().unwrap().insert("extra".into(), 1.into());
    assert!(serde_json::from_value::<ExperimentPlan>(v).is_err());
}

fn labels() -> impl Strategy<Value = (Vec<usize>, usize)> {
    (2usize..8, 1usize..5).prop_flat_map(|(folds, classes)| {
        proptest::collection::vec(folds..folds * 4, classes).prop_map(move |sizes| {
            let mut l: Vec<usize> = sizes
                .iter()
                .enumerate()
                .flat_map(|(c, &s)| std::iter::repeat_n(c, s))
                .collect();
            let shift = l.len() / 3;
            l.rotate_left(shift);
            (l, folds)
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn folds_partition_the_nodes((labels, k) in labels(), seed in any::<u64>()) {
        let folds = make_folds(&labels, k, seed).unwrap();
        prop_assert_eq!(folds.len(), k);
        let mut hits = vec![0usize; labels.len()];
        let mut sizes = Vec::new();
        for f in &folds {
            for (i, (&tr, &te)) in f.train.iter().zip(&f.test).enumerate() {
                prop_assert!(tr != te);
                if te {
                    hits[i] += 1;
                }
            }
            sizes.push(f.test.iter().filter(|t| **t).count());
        }
        prop_assert!(hits.iter().all(|h| *h == 1));
        prop_assert!(sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1);
        let classes = labels.iter().max().unwrap() + 1;
        for c in 0..classes {
            let per: Vec<usize> = folds
                .iter()
                .map(|f| f.test.iter().zip(&labels).filter(|(t, l)| **t && **l == c).count())
                .collect();
            prop_assert!(per.iter().max().unwrap() - per.iter().min().unwrap() <= 1);
        }
        prop_assert_eq!(make_folds(&labels, k, seed).unwrap(), folds);
    }
}
