use ndarray::Array2;

use crate::error::{Error, Result};
use crate::graph::SocialGraph;

/// Truncated Katz similarity `Σ_{x=1..max_power} βˣ Aˣ`.
pub fn katz_matrix(graph: &SocialGraph, beta: f64, max_power: u32) -> Result<Array2<f64>> {
    if !(beta >= 0.0 && beta.is_finite()) {
        return Err(Error::invalid(format!("katz beta = {beta} must be >= 0")));
    }
    if max_power < 1 {
        return Err(Error::invalid("katz max_power must be at least 1"));
    }
    let a = graph.adjacency_matrix();
    let mut power = a.clone();
    let mut acc = &a * beta;
    for x in 2..=max_power {
        power = power.dot(&a);
        acc.scaled_add(beta.powi(x as i32), &power);
    }
    Ok(acc)
}
