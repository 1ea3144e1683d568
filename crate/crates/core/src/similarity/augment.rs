use ndarray::Array2;

use super::Thresholds;
use crate::error::{Error, Result};

/// Divides each row by its L2 norm; all-zero rows are left alone.
pub fn l2_normalize_rows(matrix: &Array2<f64>) -> Array2<f64> {
    let mut out = matrix.clone();
    for mut row in out.rows_mut() {
        let norm = row.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm > 0.0 {
            row.mapv_inplace(|v| v / norm);
        }
    }
    out
}

/// L2 row normalisation followed by the two-threshold clamp.
pub fn augment(matrix: &Array2<f64>, thresholds: Thresholds) -> Result<Array2<f64>> {
    augment_with_mask(matrix, thresholds).map(|(m, _)| m)
}

/// As [`augment`], also returning which entries the thresholds collapsed to
/// 0 or 1 (entries that were already zero are not counted as collapsed).
pub(crate) fn augment_with_mask(matrix: &Array2<f64>, thresholds: Thresholds) -> Result<(Array2<f64>, Array2<bool>)> {
    if let Some(bad) = matrix.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
        return Err(Error::invalid(format!(
            "similarity entries must be finite and non-negative, found {bad}"
        )));
    }
    threshold_with_mask(l2_normalize_rows(matrix), thresholds)
}

/// The clamp step alone, for a matrix that is already row-normalised.
pub fn apply_thresholds(matrix: &Array2<f64>, thresholds: Thresholds) -> Result<Array2<f64>> {
    threshold_with_mask(matrix.clone(), thresholds).map(|(m, _)| m)
}

fn threshold_with_mask(mut out: Array2<f64>, thresholds: Thresholds) -> Result<(Array2<f64>, Array2<bool>)> {
    let mut collapsed = Array2::from_elem(out.raw_dim(), false);
    match thresholds {
        Thresholds::Range { lo, hi } => {
            if lo > hi {
                return Err(Error::invalid(format!("thresholds ({lo}, {hi}) must satisfy lo <= hi")));
            }
            for (v, c) in out.iter_mut().zip(collapsed.iter_mut()) {
                if *v == 0.0 {
                    continue;
                }
                if *v <= lo {
                    *v = 0.0;
                    *c = true;
                } else if *v > hi {
                    *v = 1.0;
                    *c = true;
                }
            }
        }
        Thresholds::Auto => {
            let (sum, count) = out
                .iter()
                .filter(|v| **v != 0.0)
                .fold((0.0, 0usize), |(s, c), v| (s + v, c + 1));
            if count > 0 {
                let mean = sum / count as f64;
                for (v, c) in out.iter_mut().zip(collapsed.iter_mut()) {
                    if *v != 0.0 {
                        *v = if *v <= mean { 0.0 } else { 1.0 };
                        *c = true;
                    }
                }
            }
        }
    }
    Ok((out, collapsed))
}
