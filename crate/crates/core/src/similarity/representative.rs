use ndarray::{Array1, Array2};

use super::augment::augment_with_mask;
use super::{gg_matrix, katz_matrix, rpr_matrix, SimilarityKind, SimilaritySpec};
use crate::error::Result;
use crate::graph::SocialGraph;

/// The matrix fed to every graph-convolution layer.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphRepresentative {
    pub matrix: Array2<f64>,
    pub spec: SimilaritySpec,
    /// Source snapshot plus the processing steps applied.
    pub provenance: String,
}

impl GraphRepresentative {
    /// `G = I`, used by the feature-only model.
    pub fn identity(n: usize) -> Self {
        GraphRepresentative {
            matrix: Array2::eye(n),
            spec: SimilaritySpec::adjacency(),
            provenance: "identity".into(),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }
}

/// `Â`: the symmetric, zero-diagonal matrix that receives self-loops.
///
/// For `Adjacency` this is `A`. Similarity kinds compute the raw similarity,
/// drop the diagonal, L2-normalise rows and clamp (see
/// [`augment`](super::augment)), then symmetrise as `(M + Mᵀ)/2`. A pair whose
/// two directed entries were both collapsed by the thresholds keeps the larger
/// of the two so the result stays binary there.
pub fn similarity_pipeline(graph: &SocialGraph, spec: &SimilaritySpec) -> Result<Array2<f64>> {
    spec.validate()?;
    let mut raw = match spec.kind {
        SimilarityKind::Adjacency => return Ok(graph.adjacency_matrix()),
        SimilarityKind::Katz => katz_matrix(graph, spec.katz_beta, spec.katz_max_power)?,
        SimilarityKind::Rpr => rpr_matrix(graph, spec.rpr_alpha)?,
        SimilarityKind::Gg => gg_matrix(graph),
    };
    raw.diag_mut().fill(0.0);
    let (m, collapsed) = augment_with_mask(&raw, spec.thresholds)?;
    let n = m.nrows();
    Ok(Array2::from_shape_fn((n, n), |(i, j)| {
        if collapsed[[i, j]] && collapsed[[j, i]] {
            m[[i, j]].max(m[[j, i]])
        } else {
            0.5 * (m[[i, j]] + m[[j, i]])
        }
    }))
}

/// `D̃^{-1/2} (Â + I) D̃^{-1/2}` with `D̃` the row sums of `Â + I`.
pub fn symmetric_normalize(a_hat: &Array2<f64>) -> Array2<f64> {
    let mut a_tilde = a_hat.clone();
    a_tilde.diag_mut().mapv_inplace(|v| v + 1.0);
    let deg: Array1<f64> = a_tilde.sum_axis(ndarray::Axis(1));
    let n = a_tilde.nrows();
    Array2::from_shape_fn((n, n), |(i, j)| a_tilde[[i, j]] / (deg[i] * deg[j]).sqrt())
}

pub fn build_representative(graph: &SocialGraph, spec: &SimilaritySpec) -> Result<GraphRepresentative> {
    let a_hat = similarity_pipeline(graph, spec)?;
    let matrix = symmetric_normalize(&a_hat);
    let steps = match spec.kind {
        SimilarityKind::Adjacency => "A+I, sym-norm".to_string(),
        _ => format!(
            "{} zero-diag, l2-rows, thresholds {}, (M+M^T)/2, +I, sym-norm",
            spec.kind.tag(),
            spec.thresholds
        ),
    };
    Ok(GraphRepresentative {
        matrix,
        spec: *spec,
        provenance: format!("snapshot {}: {steps}", graph.snapshot_index()),
    })
}
