mod common;

use proptest::prelude::*;

use common::walk_counts;
use socsim_core::exec::Execution;
use socsim_core::graph::SocialGraph;
use socsim_core::rng;
use socsim_core::sdna::{
    emit_event_stream, generate_population, mutate, pair_score, run_dynamic, socialise_with, Sdna, SimConfig,
    SocialiseOptions, StopRule,
};

fn small(seed: u64, n: usize, q: usize) -> SimConfig {
    SimConfig {
        n,
        f: 5,
        y: 3,
        q,
        c: (0..q - 1).map(|x| 0.5f64.powi(x as i32 + 1)).collect(),
        p: 0.6,
        t: 0.05,
        seed,
        ..SimConfig::desk()
    }
}

/// A population with some edges already in place.
fn seeded(cfg: &SimConfig) -> (SocialGraph, Vec<Sdna>) {
    let (mut g, s) = generate_population(cfg).unwrap();
    let mut r = rng::stream(cfg.seed, &["test-edges".into()]);
    use rand::Rng;
    for i in 0..cfg.n {
        for j in i + 1..cfg.n {
            if r.gen::<f64>() < 0.15 {
                g.add_edge(i, j).unwrap();
            }
        }
    }
    (g, s)
}

/// Score written out term by term from the definitions.
fn reference_score(g: &SocialGraph, sdnas: &[Sdna], cfg: &SimConfig, i: usize, j: usize) -> f64 {
    let (si, sj) = (&sdnas[g.sdna_of()[i]], &sdnas[g.sdna_of()[j]]);
    let x = g.features();
    let mut phi = 0.0;
    for m in 0..cfg.f {
        let diff = (x[[i, m]] - x[[j, m]]).abs();
        phi += diff * si.w[m] * f64::from(si.l[m]) + diff * sj.w[m] * f64::from(sj.l[m]);
    }
    let edges: Vec<(usize, usize)> = g.edges().collect();
    let deg = |v: usize| edges.iter().filter(|e| e.0 == v || e.1 == v).count() as f64;
    let delta = deg(j) * si.d + deg(i) * sj.d;
    let walks = walk_counts(cfg.n, &edges, cfg.q);
    let mut pi = 0.0;
    for x in 2..=cfg.q {
        if walks[x - 1][i][j] > 0 {
            pi += cfg.c[x - 2] * (si.k[x - 2] + sj.k[x - 2]);
        }
    }
    phi + cfg.r * delta + pi
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn pair_score_matches_reference(seed in any::<u64>(), n in 3usize..12, q in 2usize..6) {
        let cfg = small(seed, n, q);
        let (g, s) = seeded(&cfg);
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    prop_assert!(pair_score(i, j, &g, &s, &cfg).is_err());
                    continue;
                }
                let got = pair_score(i, j, &g, &s, &cfg).unwrap();
                let want = reference_score(&g, &s, &cfg, i, j);
                prop_assert!((got - want).abs() <= 1e-12 * want.abs().max(1.0), "{} vs {}", got, want);
                prop_assert_eq!(got, pair_score(j, i, &g, &s, &cfg).unwrap());
            }
        }
    }

    #[test]
    fn socialise_connects_the_top_ranked_pairs(seed in any::<u64>(), n in 3usize..20, t in 0.0..0.5f64, p in 0.0..=1.0f64) {
        let cfg = SimConfig { t, p, ..small(seed, n, 4) };
        let (mut g, s) = seeded(&cfg);
        let before: Vec<_> = g.edges().collect();
        let universe = g.unconnected_pairs().len();
        let out = socialise_with(&mut g, &s, &cfg, &mut rng::stream(seed, &[]), SocialiseOptions::default()).unwrap();
        prop_assert_eq!(out.stopping_len, (t * universe as f64).floor() as usize);
        prop_assert_eq!(out.connected.len(), out.stopping_len.min(out.scored.len()));
        prop_assert!(out.scored.windows(2).all(|w| w[0].score >= w[1].score));
        for (c, sp) in out.connected.iter().zip(&out.scored) {
            prop_assert_eq!(*c, (sp.i, sp.j));
        }
        prop_assert_eq!(g.edge_count(), before.len() + out.connected.len());
        for e in before {
            prop_assert!(g.has_edge(e.0, e.1));
        }
    }

    #[test]
    fn mutation_keeps_records_valid(seed in any::<u64>(), z in 0.0..=1.0f64, q in 2usize..7, flip in any::<bool>()) {
        let cfg = SimConfig { z, mutate_preference: flip, ..small(seed, 6, q) };
        let (_, original) = generate_population(&cfg).unwrap();
        let mut s = original.clone();
        for round in 0..5u64 {
            mutate(&mut s, &cfg, &mut rng::stream(seed, &[round.into()])).unwrap();
            for sd in &s {
                sd.check(cfg.f, cfg.q).unwrap();
            }
        }
        if !flip {
            for (a, b) in s.iter().zip(&original) {
                prop_assert_eq!(&a.l, &b.l);
            }
        }
    }
}

#[test]
fn sequential_and_parallel_rounds_agree() {
    let cfg = small(5, 40, 4);
    let (g0, s) = seeded(&cfg);
    let run = |exec| {
        let mut g = g0.clone();
        let out = socialise_with(
            &mut g,
            &s,
            &cfg,
            &mut rng::stream(1, &[]),
            SocialiseOptions {
                stop: StopRule::Fraction,
                exec,
            },
        )
        .unwrap();
        (g, out)
    };
    assert_eq!(run(Execution::Sequential), run(Execution::Parallel));
}

#[test]
fn snapshots_only_grow() {
    let snaps = run_dynamic(
        &SimConfig {
            seed: 3,
            ..SimConfig::desk()
        },
        4,
    )
    .unwrap();
    for (k, pair) in snaps.windows(2).enumerate() {
        let (a, b) = (&pair[0].graph, &pair[1].graph);
        assert!(a.edges().all(|(i, j)| b.has_edge(i, j)));
        assert_eq!(b.edge_count(), a.edge_count() + pair[1].added_edges);
        assert_eq!(b.snapshot_index(), k + 1);
        assert_eq!(a.features(), b.features());
    }
    assert_eq!(
        run_dynamic(
            &SimConfig {
                seed: 3,
                ..SimConfig::desk()
            },
            4
        )
        .unwrap(),
        snaps
    );
}

#[test]
fn event_stream_adds_one_distinct_edge_per_tick() {
    let cfg = small(8, 15, 4);
    let stream = emit_event_stream(&cfg, 40).unwrap();
    assert_eq!(stream.events.len(), 40);
    assert!(!stream.saturated);
    let mut seen = std::collections::HashSet::new();
    for (k, e) in stream.events.iter().enumerate() {
        assert_eq!(e.timestamp, k);
        assert!(e.i < e.j);
        assert!(seen.insert((e.i, e.j)));
    }
    let full = emit_event_stream(&small(8, 6, 4), 100).unwrap();
    assert!(full.saturated);
    assert!(full.events.len() <= 15);
}
