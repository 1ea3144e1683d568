//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any criterion fails.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use ndarray::Array2;
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRng, TestRunner};
use rand::Rng;

use common::{
    floyd_warshall, gradcheck_cases, gradcheck_model, max_gradient_error, random_edges, rng, rpr_power_iteration,
    walk_counts, GradInstance,
};
use socsim_core::exec::Execution;
use socsim_core::gcn::GcnConfig;
use socsim_core::graph::SocialGraph;
use socsim_core::harness::{
    default_grid, emit_report, make_folds, ExperimentPlan, ExperimentReport, Hypothesis, CELL_F, CELL_FT, REPORT_FILE,
};
use socsim_core::rng as streams;
use socsim_core::sdna::{
    feature_score, feature_score_one_way, generate_population, mutate, pair_score, path_score, popularity_score,
    run_dynamic, SimConfig,
};
use socsim_core::similarity::{augment, gg_raw_scores, katz_matrix, l2_normalize_rows, rpr_matrix, Thresholds};

const BATCH_SEED: u64 = 2024;

type Check = Result<String, String>;

fn runner(cases: u32) -> TestRunner {
    let config = Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    };
    let rng = TestRng::deterministic_rng(config.rng_algorithm);
    TestRunner::new_with_rng(config, rng)
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn gradient_oracle() -> Check {
    let mut worst = 0.0f64;
    for (name, variant, use_s, kind) in gradcheck_cases() {
        let inst = GradInstance::new(kind);
        let err = max_gradient_error(&gradcheck_model(variant, use_s, 1), &inst.inputs(), 1e-5, 1e-6);
        ensure(err < 1e-4, || format!("{name}: relative error {err:e}"))?;
        worst = worst.max(err);
    }
    Ok(format!("6 configurations, worst relative error {worst:.1e}"))
}

fn similarity_oracles() -> Check {
    let mut rpr_worst = 0.0f64;
    for seed in 0..20 {
        let n = 6;
        let edges = random_edges(n, 0.4, &mut rng(seed));
        let g = SocialGraph::from_edges(n, &edges).map_err(|e| e.to_string())?;
        let beta = 0.005;
        let k = katz_matrix(&g, beta, 5).map_err(|e| e.to_string())?;
        let walks = walk_counts(n, &edges, 5);
        let sp = floyd_warshall(n, &edges);
        let raw = gg_raw_scores(&g);
        let deg: Vec<f64> = (0..n)
            .map(|i| edges.iter().filter(|e| e.0 == i || e.1 == i).count() as f64)
            .collect();
        for i in 0..n {
            for j in 0..n {
                let mut katz = beta * walks[0][i][j] as f64;
                for (x, w) in walks.iter().enumerate().skip(1) {
                    katz += beta.powi(x as i32 + 1) * w[i][j] as f64;
                }
                ensure(k[[i, j]] == katz, || {
                    format!("katz seed {seed} ({i},{j}): {} vs {katz}", k[[i, j]])
                })?;
                let linked = edges.contains(&(i.min(j), i.max(j)));
                let gg = match sp[i][j] {
                    Some(d) if i != j && !linked => deg[i] * deg[j] / f64::from(d * d),
                    _ => 0.0,
                };
                ensure(raw[[i, j]] == gg, || {
                    format!("gg seed {seed} ({i},{j}): {} vs {gg}", raw[[i, j]])
                })?;
            }
        }
        let closed = rpr_matrix(&g, 0.85).map_err(|e| e.to_string())?;
        let iterated = rpr_power_iteration(n, &edges, 0.85);
        let err = (&closed - &iterated).iter().fold(0.0f64, |m, v| m.max(v.abs()));
        ensure(err < 1e-8, || format!("rpr seed {seed}: {err:e}"))?;
        rpr_worst = rpr_worst.max(err);
    }
    Ok(format!(
        "20 graphs, katz and gg exact, rpr max deviation {rpr_worst:.1e}"
    ))
}

fn random_graph_reduction() -> Check {
    let samples = 200;
    let pairs: f64 = 50.0 * 49.0 / 2.0;
    let (mu, var) = (pairs * 0.2, pairs * 0.2 * 0.8);
    let sigma = var.sqrt();
    let mut counts = Vec::with_capacity(samples);
    for seed in 0..samples as u64 {
        let cfg = SimConfig {
            n: 50,
            p: 0.2,
            t: 1.0,
            seed,
            ..SimConfig::desk()
        };
        let snap = run_dynamic(&cfg, 1).map_err(|e| e.to_string())?.remove(0);
        ensure(snap.added_edges == snap.scored_pairs, || {
            format!("seed {seed}: scored pairs left unconnected")
        })?;
        counts.push(snap.graph.edge_count() as f64);
    }
    let n = samples as f64;
    let mean = counts.iter().sum::<f64>() / n;
    let sample_var = counts.iter().map(|c| (c - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let outliers = counts.iter().filter(|c| (*c - mu).abs() > 3.0 * sigma).count();
    let mean_band = 3.0 * sigma / n.sqrt();
    let var_band = 3.0 * var * (2.0 / (n - 1.0)).sqrt();
    ensure((mean - mu).abs() <= mean_band, || {
        format!("mean edges {mean:.2} vs {mu} ± {mean_band:.2}")
    })?;
    ensure((sample_var - var).abs() <= var_band, || {
        format!("variance {sample_var:.1} vs {var} ± {var_band:.1}")
    })?;
    // about 0.27% of draws fall outside 3σ; allow up to 3 of 200
    ensure(outliers <= 3, || format!("{outliers} samples outside 3σ"))?;
    Ok(format!(
        "mean {mean:.2} (expected {mu}), variance {sample_var:.1} (expected {var}), {outliers} beyond 3σ"
    ))
}

fn score_algebra() -> Check {
    let mut r = runner(1000);
    r.run(&any::<u64>(), |seed| {
        let mut g_rng = rng(seed);
        let n = g_rng.gen_range(4..12);
        let f = g_rng.gen_range(1..6);
        let q = g_rng.gen_range(2..6);
        let cfg = SimConfig {
            n,
            f,
            y: 2,
            q,
            r: g_rng.gen_range(0.0..1.0),
            c: (0..q - 1).map(|_| g_rng.gen_range(0.0..1.0)).collect(),
            seed,
            ..SimConfig::desk()
        };
        let (base, mut sdnas) = generate_population(&cfg).unwrap();
        // nodes 0 and 1 share sDNA 0; the rest are random
        let labels: Vec<usize> = (0..n).map(|v| if v < 2 { 0 } else { g_rng.gen_range(0..2) }).collect();
        let mut g = SocialGraph::new(base.features().clone(), labels).unwrap();
        let empty = g.clone();
        for (a, b) in random_edges(n, 0.3, &mut g_rng) {
            g.add_edge(a, b).unwrap();
        }
        let (i, j) = (g_rng.gen_range(0..n), g_rng.gen_range(0..n));
        if i != j {
            let s = pair_score(i, j, &g, &sdnas, &cfg).unwrap();
            prop_assert_eq!(s, pair_score(j, i, &g, &sdnas, &cfg).unwrap());
            let phi = feature_score(i, j, &g, &sdnas).unwrap();
            let delta = popularity_score(i, j, &g, &sdnas).unwrap();
            let pi = path_score(i, j, &g, &sdnas).unwrap();
            let composed = phi + cfg.r * delta + pi.iter().zip(&cfg.c).map(|(p, c)| p * c).sum::<f64>();
            prop_assert!(
                (s - composed).abs() <= 1e-12 * s.abs().max(1.0),
                "{} vs {}",
                s,
                composed
            );
            prop_assert_eq!(popularity_score(i, j, &empty, &sdnas).unwrap(), 0.0);
            prop_assert!(path_score(i, j, &empty, &sdnas).unwrap().iter().all(|p| *p == 0.0));
            prop_assert_eq!(
                pair_score(i, j, &empty, &sdnas, &cfg).unwrap(),
                feature_score(i, j, &empty, &sdnas).unwrap()
            );
        }
        let x = g.features();
        let one_way = feature_score_one_way(x.row(0), x.row(1), &sdnas[0]).unwrap();
        prop_assert_eq!(feature_score(0, 1, &g, &sdnas).unwrap(), 2.0 * one_way);
        prop_assert_eq!(feature_score_one_way(x.row(0), x.row(0), &sdnas[0]).unwrap(), 0.0);
        sdnas[0].w.iter_mut().for_each(|w| *w = 0.0);
        prop_assert_eq!(feature_score_one_way(x.row(0), x.row(1), &sdnas[0]).unwrap(), 0.0);
        Ok(())
    })
    .map_err(|e| e.to_string())?;
    Ok("1000 instances: symmetry, same-sDNA doubling, zero cases, composition".into())
}

fn chance_level_features() -> Check {
    let plan = ExperimentPlan {
        networks: 1,
        snapshots: 1,
        model_grid: default_grid(&GcnConfig::default())
            .into_iter()
            .filter(|c| c.name == CELL_F)
            .collect(),
        ..ExperimentPlan::desk(BATCH_SEED)
    };
    let report = socsim_core::harness::run_experiment(&plan).map_err(|e| e.to_string())?;
    let cell = report.snapshots[0].cell(CELL_F).ok_or("F cell missing")?;
    let mean = cell.mean.ok_or_else(|| format!("F failed: {:?}", cell.error))?;
    ensure((0.18..=0.32).contains(&mean), || {
        format!("F mean accuracy {mean:.3} outside [0.18, 0.32]")
    })?;
    Ok(format!("F mean accuracy {mean:.3} over 10 folds"))
}

fn batch_plan() -> ExperimentPlan {
    ExperimentPlan {
        networks: 5,
        snapshots: 2,
        ..ExperimentPlan::desk(BATCH_SEED)
    }
}

fn integration_hypothesis(report: &ExperimentReport) -> Check {
    let holds = report.hypothesis_holds_count();
    let listing: Vec<String> = report
        .snapshots
        .iter()
        .map(|s| {
            format!(
                "{}:{}",
                s.name,
                if s.hypothesis == Hypothesis::Holds { "y" } else { "n" }
            )
        })
        .collect();
    ensure(report.snapshots.len() == 10, || {
        format!("{} snapshots", report.snapshots.len())
    })?;
    ensure(report.failed_cells() == 0, || {
        format!("{} failed cells", report.failed_cells())
    })?;
    ensure(holds >= 7, || format!("holds on {holds}/10 [{}]", listing.join(" ")))?;
    Ok(format!("holds on {holds}/10 [{}]", listing.join(" ")))
}

fn variant_improvement(report: &ExperimentReport) -> Check {
    let mut wins = 0;
    let mut rows = Vec::new();
    for (k, snap) in report.snapshots.iter().enumerate() {
        let ft = snap.mean_of(CELL_FT).ok_or("FTvanilla missing")?;
        let best = report
            .best_cell_where(k, |c| {
                c.similarity.kind != socsim_core::similarity::SimilarityKind::Adjacency
            })
            .and_then(|c| c.mean.map(|m| (c.name.clone(), m)))
            .ok_or("no similarity cell")?;
        if best.1 >= ft {
            wins += 1;
        }
        rows.push(format!("{} {:.3}/{:.3}", snap.name, best.1, ft));
    }
    ensure(wins >= 6, || format!("{wins}/10 [{}]", rows.join(", ")))?;
    Ok(format!(
        "best similarity cell >= FTvanilla on {wins}/10 [{}]",
        rows.join(", ")
    ))
}

fn report_bytes(report: &ExperimentReport) -> Result<Vec<u8>, String> {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    emit_report(report, dir.path()).map_err(|e| e.to_string())?;
    std::fs::read(dir.path().join(REPORT_FILE)).map_err(|e| e.to_string())
}

fn determinism(first: &ExperimentReport) -> Check {
    // the rerun is sequential, so this also pins the parallel path to the sequential one
    let again = socsim_core::harness::run_experiment_with(&batch_plan(), Execution::Sequential, |_| {})
        .map_err(|e| e.to_string())?;
    let (a, b) = (report_bytes(first)?, report_bytes(&again)?);
    ensure(a == b, || "report.json differs between runs".into())?;
    Ok(format!("report.json identical across runs ({} bytes)", a.len()))
}

fn invariant_suites() -> Check {
    let cases = 500;
    let config = (any::<u64>(), 1usize..8, 2usize..6, any::<bool>());
    runner(cases)
        .run(&config, |(seed, f, q, flip)| {
            let cfg = SimConfig {
                n: 6,
                f,
                y: 3,
                q,
                c: vec![0.5; q - 1],
                mutate_preference: flip,
                seed,
                ..SimConfig::desk()
            };
            let (_, original) = generate_population(&cfg).unwrap();
            let mut same = original.clone();
            mutate(
                &mut same,
                &SimConfig { z: 0.0, ..cfg.clone() },
                &mut streams::stream(seed, &["z0".into()]),
            )
            .unwrap();
            prop_assert_eq!(&same, &original);
            let mut fresh = original.clone();
            mutate(
                &mut fresh,
                &SimConfig { z: 1.0, ..cfg.clone() },
                &mut streams::stream(seed, &["z1".into()]),
            )
            .unwrap();
            for (a, b) in fresh.iter().zip(&original) {
                prop_assert!(a.check(cfg.f, cfg.q).is_ok());
                prop_assert!(a.w.iter().zip(&b.w).all(|(x, y)| x != y));
                prop_assert!(a.k.iter().zip(&b.k).all(|(x, y)| x != y));
                prop_assert!(a.d != b.d);
                if !flip {
                    prop_assert_eq!(&a.l, &b.l);
                }
            }
            Ok(())
        })
        .map_err(|e| format!("mutation: {e}"))?;

    let matrix = (1usize..8, 1usize..8).prop_flat_map(|(r, c)| {
        proptest::collection::vec(prop_oneof![Just(0.0), 0.0..10.0f64], r * c)
            .prop_map(move |v| Array2::from_shape_vec((r, c), v).unwrap())
    });
    runner(cases)
        .run(&matrix, |m| {
            let out = augment(&m, Thresholds::Range { lo: 0.0, hi: 1.0 }).unwrap();
            prop_assert_eq!(out, l2_normalize_rows(&m));
            Ok(())
        })
        .map_err(|e| format!("augmentation: {e}"))?;

    let labels = (2usize..11, 1usize..5, any::<u64>()).prop_flat_map(|(k, classes, seed)| {
        proptest::collection::vec(k..k * 4, classes).prop_map(move |sizes| {
            let mut l: Vec<usize> = sizes
                .iter()
                .enumerate()
                .flat_map(|(c, &s)| std::iter::repeat_n(c, s))
                .collect();
            let shift = seed as usize % l.len();
            l.rotate_left(shift);
            (l, k, seed)
        })
    });
    runner(cases)
        .run(&labels, |(labels, k, seed)| {
            let folds = make_folds(&labels, k, seed).unwrap();
            let mut hits = vec![0; labels.len()];
            for f in &folds {
                for (v, (&tr, &te)) in f.train.iter().zip(&f.test).enumerate() {
                    prop_assert!(tr != te);
                    hits[v] += usize::from(te);
                }
            }
            prop_assert!(hits.iter().all(|h| *h == 1));
            let sizes: Vec<usize> = folds.iter().map(|f| f.test.iter().filter(|t| **t).count()).collect();
            prop_assert!(sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1);
            Ok(())
        })
        .map_err(|e| format!("folds: {e}"))?;
    Ok(format!("mutation, augmentation and fold suites, {cases} cases each"))
}

struct Tally {
    failed: Vec<u32>,
}

impl Tally {
    fn record(&mut self, id: u32, title: &str, limit: Option<Duration>, check: impl FnOnce() -> Check) {
        let start = Instant::now();
        let outcome = check();
        let took = start.elapsed();
        let outcome = match (outcome, limit) {
            (Ok(_), Some(l)) if took > l => Err(format!("took {took:.1?}, limit {l:?}")),
            (o, _) => o,
        };
        match outcome {
            Ok(detail) => println!("criterion {id} PASS {title}: {detail} ({took:.1?})"),
            Err(detail) => {
                println!("criterion {id} FAIL {title}: {detail} ({took:.1?})");
                self.failed.push(id);
            }
        }
    }
}

fn main() -> ExitCode {
    let secs = Duration::from_secs;
    let mut t = Tally { failed: Vec::new() };
    t.record(1, "gradient oracle", Some(secs(10)), gradient_oracle);
    t.record(2, "similarity oracles", Some(secs(10)), similarity_oracles);
    t.record(3, "random-graph reduction", Some(secs(30)), random_graph_reduction);
    t.record(4, "score algebra", Some(secs(5)), score_algebra);
    t.record(5, "feature-only at chance", Some(secs(300)), chance_level_features);

    let start = Instant::now();
    let batch = socsim_core::harness::run_experiment_with(&batch_plan(), Execution::Parallel, |_| {});
    let batch_time = start.elapsed();
    match &batch {
        Ok(report) => {
            t.record(
                6,
                "integration hypothesis",
                Some(secs(1800).saturating_sub(batch_time)),
                || integration_hypothesis(report),
            );
            t.record(7, "variant improvement", None, || variant_improvement(report));
            t.record(8, "determinism", None, || determinism(report));
        }
        Err(e) => {
            for (id, title) in [
                (6, "integration hypothesis"),
                (7, "variant improvement"),
                (8, "determinism"),
            ] {
                t.record(id, title, None, || Err(format!("batch run failed: {e}")));
            }
        }
    }
    println!("batch experiment: {batch_time:.1?}");
    t.record(9, "invariant suites", Some(secs(30)), invariant_suites);

    if t.failed.is_empty() {
        println!("acceptance: all criteria pass");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: failed {:?}", t.failed);
        ExitCode::FAILURE
    }
}
