use ndarray::Array2;

use crate::graph::SocialGraph;

/// Raw graph-gravity scores `deg(i)·deg(j) / SP(i,j)²` for every unconnected,
/// mutually reachable pair; zero on edges, unreachable pairs and the diagonal.
pub fn gg_raw_scores(graph: &SocialGraph) -> Array2<f64> {
    let n = graph.node_count();
    let degrees = graph.degrees();
    let sp = graph.shortest_path_matrix();
    Array2::from_shape_fn((n, n), |(i, j)| {
        if i == j || graph.has_edge(i, j) {
            return 0.0;
        }
        match sp.get(i, j) {
            Some(hops) => {
                let hops = hops as u64;
                (degrees[i] as u64 * degrees[j] as u64) as f64 / (hops * hops) as f64
            }
            None => 0.0,
        }
    })
}

/// `A + minmax(gg_raw_scores)`: existing edges are exactly 1, reachable
/// non-edges are min-max scaled into `[0, 1]`.
///
/// When every non-edge score is equal the range is degenerate and each such
/// pair is set to 1.
pub fn gg_matrix(graph: &SocialGraph) -> Array2<f64> {
    let n = graph.node_count();
    let raw = gg_raw_scores(graph);
    let sp = graph.shortest_path_matrix();
    let candidates = || {
        (0..n)
            .flat_map(move |i| (0..n).map(move |j| (i, j)))
            .filter(|&(i, j)| i != j && !graph.has_edge(i, j) && sp.get(i, j).is_some())
    };
    let (lo, hi) = candidates().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), (i, j)| {
        (lo.min(raw[[i, j]]), hi.max(raw[[i, j]]))
    });
    let mut out = graph.adjacency_matrix();
    let range = hi - lo;
    for (i, j) in candidates() {
        out[[i, j]] = if range > 0.0 { (raw[[i, j]] - lo) / range } else { 1.0 };
    }
    out
}
