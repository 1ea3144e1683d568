use nalgebra::DMatrix;
use ndarray::Array2;

use crate::error::{Error, Result};
use crate::graph::SocialGraph;

/// Rooted PageRank: row `i` is the stationary distribution of a walk that
/// restarts at `i` with probability `alpha` and otherwise steps to a uniform
/// random neighbour. `R = α (I − (1−α) P)⁻¹` with `P` row-stochastic;
/// isolated nodes step to themselves.
pub fn rpr_matrix(graph: &SocialGraph, alpha: f64) -> Result<Array2<f64>> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::invalid(format!("rpr alpha = {alpha} outside (0,1)")));
    }
    let n = graph.node_count();
    let degrees = graph.degrees();
    let walk = 1.0 - alpha;
    let mut system = DMatrix::<f64>::identity(n, n);
    for (i, &deg) in degrees.iter().enumerate() {
        if deg == 0 {
            system[(i, i)] -= walk;
        } else {
            let step = walk / deg as f64;
            for j in graph.neighbors(i) {
                system[(i, j)] -= step;
            }
        }
    }
    let inverse = system
        .lu()
        .try_inverse()
        .ok_or_else(|| Error::Internal("rooted PageRank system is singular".into()))?;
    Ok(Array2::from_shape_fn((n, n), |(i, j)| alpha * inverse[(i, j)]))
}
