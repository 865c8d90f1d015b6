//! Importance-based feature selection backed by a random forest.

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::features::FeatureMatrix;
use crate::models::{train_random_forest, ForestOptions};

/// Keep columns whose forest importance reaches the threshold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ImportanceThreshold {
    /// Mean of all importances (the default).
    Mean,
    /// An absolute importance value.
    Value(f64),
}

/// Train a random forest on `(x, y)` and return a column mask keeping the
/// features whose importance is at least the threshold.
///
/// When no split exists anywhere (all-constant features), importances are
/// uniformly zero and every column is kept.
pub fn select_features_by_importance(
    x: &FeatureMatrix,
    y: &[usize],
    threshold: ImportanceThreshold,
    forest: &ForestOptions,
) -> Result<Vec<bool>> {
    let model = train_random_forest(x.data.view(), y, forest)?;
    let imp = &model.feature_importances;
    let cut = match threshold {
        ImportanceThreshold::Mean => {
            if imp.is_empty() {
                0.0
            } else {
                imp.iter().sum::<f64>() / imp.len() as f64
            }
        }
        ImportanceThreshold::Value(v) => v,
    };
    Ok(imp.iter().map(|&v| v >= cut).collect())
}

/// Project a matrix onto the masked columns.
pub fn apply_column_mask(x: &FeatureMatrix, mask: &[bool]) -> Result<FeatureMatrix> {
    if mask.len() != x.cols() {
        return Err(Error::ShapeMismatch(format!(
            "mask of {} vs {} columns",
            mask.len(),
            x.cols()
        )));
    }
    let kept: Vec<usize> = mask
        .iter()
        .enumerate()
        .filter_map(|(i, &keep)| keep.then_some(i))
        .collect();
    let mut data = Array2::<f64>::zeros((x.rows(), kept.len()));
    for r in 0..x.rows() {
        for (new_c, &c) in kept.iter().enumerate() {
            data[[r, new_c]] = x.data[[r, c]];
        }
    }
    let names = kept.iter().map(|&c| x.feature_names[c].clone()).collect();
    Ok(FeatureMatrix::new(data, x.norm_state, names))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::NormState;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn labeled_noise() -> (FeatureMatrix, Vec<usize>) {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let n = 200;
        let mut data = Array2::<f64>::zeros((n, 10));
        let mut y = Vec::with_capacity(n);
        for i in 0..n {
            let label = i % 2;
            data[[i, 0]] = label as f64;
            for j in 1..10 {
                data[[i, j]] = rng.gen::<f64>();
            }
            y.push(label);
        }
        let names = (0..10).map(|i| format!("f{i}")).collect();
        (FeatureMatrix::new(data, NormState::Tfidf, names), y)
    }

    #[test]
    fn informative_column_survives_mean_threshold() {
        let (x, y) = labeled_noise();
        let opts = ForestOptions {
            n_trees: 30,
            ..Default::default()
        };
        let mask = select_features_by_importance(&x, &y, ImportanceThreshold::Mean, &opts).unwrap();
        assert!(mask[0], "label-copy column must be kept");
        assert!(mask.iter().filter(|&&m| m).count() < 10, "noise should drop");
    }

    #[test]
    fn zero_threshold_keeps_everything() {
        let (x, y) = labeled_noise();
        let opts = ForestOptions {
            n_trees: 10,
            ..Default::default()
        };
        let mask =
            select_features_by_importance(&x, &y, ImportanceThreshold::Value(0.0), &opts).unwrap();
        assert!(mask.iter().all(|&m| m));
    }

    #[test]
    fn constant_features_keep_all_columns() {
        let n = 20;
        let data = Array2::from_elem((n, 4), 1.0);
        let y: Vec<usize> = (0..n).map(|i| i % 2).collect();
        let x = FeatureMatrix::new(
            data,
            NormState::Tfidf,
            (0..4).map(|i| format!("f{i}")).collect(),
        );
        let opts = ForestOptions {
            n_trees: 5,
            ..Default::default()
        };
        let mask = select_features_by_importance(&x, &y, ImportanceThreshold::Mean, &opts).unwrap();
        assert!(mask.iter().all(|&m| m), "uniform importances keep all");
    }

    #[test]
    fn mask_projection() {
        let (x, _) = labeled_noise();
        let mut mask = vec![false; 10];
        mask[0] = true;
        mask[3] = true;
        let projected = apply_column_mask(&x, &mask).unwrap();
        assert_eq!(projected.cols(), 2);
        assert_eq!(projected.feature_names, vec!["f0", "f3"]);
        assert_eq!(projected.data[[5, 0]], x.data[[5, 0]]);
        assert_eq!(projected.data[[5, 1]], x.data[[5, 3]]);
    }
}
