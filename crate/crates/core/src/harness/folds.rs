use rand::seq::SliceRandom;

use crate::error::{Error, Result};
use crate::rng;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoldMasks {
    pub train: Vec<bool>,
    pub test: Vec<bool>,
}

/// Stratified `folds`-way split. Each class is shuffled, then its members are
/// dealt round-robin, with one counter running across all classes so fold
/// sizes differ by at most one.
pub fn make_folds(labels: &[usize], folds: usize, seed: u64) -> Result<Vec<FoldMasks>> {
    if folds < 2 {
        return Err(Error::invalid(format!("folds = {folds} must be at least 2")));
    }
    let classes = labels.iter().max().map_or(0, |m| m + 1);
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); classes];
    for (node, &c) in labels.iter().enumerate() {
        members[c].push(node);
    }
    if let Some((c, m)) = members
        .iter()
        .enumerate()
        .find(|(_, m)| !m.is_empty() && m.len() < folds)
    {
        return Err(Error::invalid(format!(
            "class {c} has {} members, fewer than {folds} folds",
            m.len()
        )));
    }
    let mut rng = rng::stream(seed, &["folds".into()]);
    let mut group = vec![0usize; labels.len()];
    let mut counter = 0usize;
    for m in members.iter_mut() {
        m.shuffle(&mut rng);
        for &node in m.iter() {
            group[node] = counter % folds;
            counter += 1;
        }
    }
    Ok((0..folds)
        .map(|k| {
            let test: Vec<bool> = group.iter().map(|g| *g == k).collect();
            let train = test.iter().map(|t| !t).collect();
            FoldMasks { train, test }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn balanced_stratification() {
        let labels: Vec<usize> = (0..1000).map(|i| i / 250).collect();
        let folds = make_folds(&labels, 10, 3).unwrap();
        assert_eq!(folds.len(), 10);
        for f in &folds {
            assert_eq!(f.test.iter().filter(|t| **t).count(), 100);
            for c in 0..4 {
                let n = (0..1000).filter(|&i| f.test[i] && labels[i] == c).count();
                assert_eq!(n, 25);
            }
        }
        assert_eq!(folds, make_folds(&labels, 10, 3).unwrap());
        assert_ne!(folds, make_folds(&labels, 10, 4).unwrap());
    }

    #[test]
    fn small_class_is_rejected() {
        let labels = [0, 0, 0, 1, 1];
        assert!(make_folds(&labels, 3, 0).is_err());
        assert!(make_folds(&labels, 2, 0).is_ok());
        assert!(make_folds(&labels, 1, 0).is_err());
    }
}
