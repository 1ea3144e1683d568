#![allow(dead_code)]
//! Independent reference implementations used by the integration tests.

use ndarray::{array, Array2};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use socsim_core::gcn::{GcnConfig, GcnModel, TrainInputs, Variant};
use socsim_core::graph::SocialGraph;
use socsim_core::similarity::{build_representative, GraphRepresentative, SimilarityKind, SimilaritySpec, Thresholds};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Erdős–Rényi edge list.
pub fn random_edges(n: usize, p: f64, rng: &mut ChaCha8Rng) -> Vec<(usize, usize)> {
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen::<f64>() < p {
                edges.push((i, j));
            }
        }
    }
    edges
}

pub fn adjacency_counts(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<u64>> {
    let mut a = vec![vec![0u64; n]; n];
    for &(i, j) in edges {
        a[i][j] = 1;
        a[j][i] = 1;
    }
    a
}

pub fn int_matmul(a: &[Vec<u64>], b: &[Vec<u64>]) -> Vec<Vec<u64>> {
    let n = a.len();
    let mut out = vec![vec![0u64; n]; n];
    for i in 0..n {
        for k in 0..n {
            if a[i][k] == 0 {
                continue;
            }
            for j in 0..n {
                out[i][j] += a[i][k] * b[k][j];
            }
        }
    }
    out
}

/// Walk counts `A^x` for `x = 1..=max`, as exact integers.
pub fn walk_counts(n: usize, edges: &[(usize, usize)], max: usize) -> Vec<Vec<Vec<u64>>> {
    let a = adjacency_counts(n, edges);
    let mut powers = vec![a.clone()];
    for _ in 1..max {
        let next = int_matmul(powers.last().unwrap(), &a);
        powers.push(next);
    }
    powers
}

/// All-pairs hop distances; `None` for unreachable pairs.
pub fn floyd_warshall(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<Option<u32>>> {
    const INF: u32 = u32::MAX / 4;
    let mut d = vec![vec![INF; n]; n];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = 0;
    }
    for &(i, j) in edges {
        d[i][j] = 1;
        d[j][i] = 1;
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = d[i][k] + d[k][j];
                if via < d[i][j] {
                    d[i][j] = via;
                }
            }
        }
    }
    d.into_iter()
        .map(|row| row.into_iter().map(|v| (v < INF).then_some(v)).collect())
        .collect()
}

/// Rooted PageRank by iterating `π ← α e_root + (1−α) π P` to a fixed point.
pub fn rpr_power_iteration(n: usize, edges: &[(usize, usize)], alpha: f64) -> Array2<f64> {
    let a = adjacency_counts(n, edges);
    let deg: Vec<u64> = a.iter().map(|r| r.iter().sum()).collect();
    let mut out = Array2::zeros((n, n));
    for root in 0..n {
        let mut pi = vec![0.0; n];
        pi[root] = 1.0;
        for _ in 0..10_000 {
            let mut next = vec![0.0; n];
            next[root] += alpha;
            for u in 0..n {
                if deg[u] == 0 {
                    next[u] += (1.0 - alpha) * pi[u];
                } else {
                    for v in 0..n {
                        if a[u][v] == 1 {
                            next[v] += (1.0 - alpha) * pi[u] / deg[u] as f64;
                        }
                    }
                }
            }
            let delta: f64 = next.iter().zip(&pi).map(|(x, y)| (x - y).abs()).sum();
            pi = next;
            if delta < 1e-15 {
                break;
            }
        }
        for v in 0..n {
            out[[root, v]] = pi[v];
        }
    }
    out
}

/// The gradient-check instance: 6 nodes, 3 features, 2 classes.
pub struct GradInstance {
    pub rep: GraphRepresentative,
    pub features: Array2<f64>,
    pub labels: Vec<usize>,
    pub train: Vec<bool>,
    pub test: Vec<bool>,
}

impl GradInstance {
    pub fn new(kind: SimilarityKind) -> Self {
        let g = SocialGraph::from_edges(6, &[(0, 1), (1, 2), (0, 2), (2, 3), (3, 4), (4, 5)]).unwrap();
        let rep = build_representative(&g, &SimilaritySpec::of(kind, Thresholds::default())).unwrap();
        GradInstance {
            rep,
            features: array![
                [0.9, 0.1, 0.4],
                [0.2, 0.8, 0.5],
                [0.7, 0.3, 0.9],
                [0.1, 0.6, 0.2],
                [0.5, 0.5, 0.7],
                [0.3, 0.9, 0.1]
            ],
            labels: vec![0, 0, 1, 1, 0, 1],
            train: vec![true, true, true, false, true, false],
            test: vec![false, false, false, true, false, true],
        }
    }

    pub fn inputs(&self) -> TrainInputs<'_> {
        TrainInputs::new(&self.rep, &self.features, &self.labels, &self.train, &self.test).unwrap()
    }
}

/// The six configurations the gradient oracle covers.
pub fn gradcheck_cases() -> Vec<(&'static str, Variant, bool, SimilarityKind)> {
    vec![
        ("FTVanilla", Variant::FtVanilla, false, SimilarityKind::Adjacency),
        ("FTVanilla+S", Variant::FtVanilla, true, SimilarityKind::Adjacency),
        ("F", Variant::F, false, SimilarityKind::Adjacency),
        ("T", Variant::T, false, SimilarityKind::Adjacency),
        ("TLR", Variant::Tlr, false, SimilarityKind::Adjacency),
        ("FTKatz+S", Variant::FtVanilla, true, SimilarityKind::Katz),
    ]
}

pub fn gradcheck_model(variant: Variant, use_s: bool, seed: u64) -> GcnModel {
    let cfg = GcnConfig {
        variant,
        use_s,
        num_classes: 2,
        dropout_p: 0.0,
        seed,
        ..GcnConfig::default()
    };
    let mut model = GcnModel::new(cfg, 6, 3).unwrap();
    // move S away from all-ones so its gradient is exercised at a generic point
    if let Some(s) = model.params.s.as_mut() {
        let mut r = rng(seed ^ 0x5);
        s.mapv_inplace(|_| r.gen_range(0.5..1.5));
    }
    model
}

/// Largest relative deviation between the analytic gradient and central
/// differences with step `eps`. Entries where both are below `floor` in
/// magnitude are compared against `floor` instead.
pub fn max_gradient_error(model: &GcnModel, inputs: &TrainInputs<'_>, eps: f64, floor: f64) -> f64 {
    let analytic = model.gradients(inputs).unwrap();
    let analytic: Vec<Array2<f64>> = analytic.tensors().into_iter().cloned().collect();
    let mut probe = model.clone();
    let mut worst = 0.0f64;
    for (t, grad) in analytic.iter().enumerate() {
        for r in 0..grad.nrows() {
            for c in 0..grad.ncols() {
                let original = probe.params.tensors()[t][[r, c]];
                probe.params.tensors_mut()[t][[r, c]] = original + eps;
                let up = probe.objective(inputs).unwrap();
                probe.params.tensors_mut()[t][[r, c]] = original - eps;
                let down = probe.objective(inputs).unwrap();
                probe.params.tensors_mut()[t][[r, c]] = original;
                let numeric = (up - down) / (2.0 * eps);
                let a = grad[[r, c]];
                let err = (a - numeric).abs() / a.abs().max(numeric.abs()).max(floor);
                worst = worst.max(err);
            }
        }
    }
    worst
}
