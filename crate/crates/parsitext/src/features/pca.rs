//! Principal component analysis retaining a target explained-variance ratio.

use ndarray::{Array1, Array2};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::{FeatureMatrix, NormState};
use crate::linalg::jacobi_eigh;

/// Fitted PCA: column means, orthonormal components (one per row), and the
/// per-component explained-variance fractions.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PcaModel {
    pub mean: Array1<f64>,
    /// `k x d`, rows orthonormal.
    pub components: Array2<f64>,
    pub explained_variance_ratio: Vec<f64>,
    pub target_ratio: f64,
}

impl PcaModel {
    pub fn n_components(&self) -> usize {
        self.components.nrows()
    }

    pub fn retained_ratio(&self) -> f64 {
        self.explained_variance_ratio.iter().sum()
    }
}

/// Fit PCA on mean-centered data, keeping the smallest number of components
/// whose explained-variance ratios sum to at least `target_ratio`.
///
/// The eigenproblem is solved on whichever of the covariance (`d x d`) or
/// Gram (`n x n`) matrix is smaller; both give the identical non-zero
/// spectrum.
pub fn pca_fit(x: &FeatureMatrix, target_ratio: f64) -> Result<PcaModel> {
    if !(target_ratio > 0.0 && target_ratio <= 1.0) {
        return Err(Error::InvalidConfig(format!(
            "pca target ratio {target_ratio} not in (0, 1]"
        )));
    }
    let n = x.rows();
    let d = x.cols();
    if n < 2 {
        return Err(Error::InsufficientData(format!(
            "pca needs at least 2 rows, got {n}"
        )));
    }
    let mean = x
        .data
        .mean_axis(ndarray::Axis(0))
        .expect("n >= 2 rows checked above");
    let centered = &x.data - &mean.view().insert_axis(ndarray::Axis(0));
    let total: f64 = centered.iter().map(|v| v * v).sum();

    if total <= f64::MIN_POSITIVE {
        // zero-variance data: a single arbitrary direction explains everything
        let mut components = Array2::<f64>::zeros((1, d));
        if d > 0 {
            components[[0, 0]] = 1.0;
        }
        return Ok(PcaModel {
            mean,
            components,
            explained_variance_ratio: vec![1.0],
            target_ratio,
        });
    }

    let (eigvals, directions) = if d <= n {
        let cov = centered.t().dot(&centered);
        let (vals, vecs) = jacobi_eigh(&cov);
        (vals, GramOrCov::Cov(vecs))
    } else {
        let gram = centered.dot(&centered.t());
        let (vals, vecs) = jacobi_eigh(&gram);
        (vals, GramOrCov::Gram(vecs))
    };

    let max_eig = eigvals.first().copied().unwrap_or(0.0).max(0.0);
    let mut ratios = Vec::new();
    let mut picked = Vec::new();
    let mut cum = 0.0;
    for (i, &lambda) in eigvals.iter().enumerate() {
        if lambda <= max_eig * 1e-12 {
            break;
        }
        let ratio = lambda / total;
        ratios.push(ratio);
        picked.push(i);
        cum += ratio;
        if cum >= target_ratio - 1e-12 {
            break;
        }
    }
    if picked.is_empty() {
        ratios.push(eigvals[0].max(0.0) / total);
        picked.push(0);
    }

    let k = picked.len();
    let mut components = Array2::<f64>::zeros((k, d));
    match directions {
        GramOrCov::Cov(vecs) => {
            for (row, &i) in picked.iter().enumerate() {
                for j in 0..d {
                    components[[row, j]] = vecs[[j, i]];
                }
            }
        }
        GramOrCov::Gram(vecs) => {
            // map Gram-space eigenvectors back to feature space and normalize
            for (row, &i) in picked.iter().enumerate() {
                let u = vecs.column(i);
                let mut v = Array1::<f64>::zeros(d);
                for r in 0..n {
                    let ur = u[r];
                    if ur != 0.0 {
                        for j in 0..d {
                            v[j] += centered[[r, j]] * ur;
                        }
                    }
                }
                let norm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
                if norm > 0.0 {
                    v.mapv_inplace(|a| a / norm);
                }
                components.row_mut(row).assign(&v);
            }
        }
    }

    Ok(PcaModel {
        mean,
        components,
        explained_variance_ratio: ratios,
        target_ratio,
    })
}

enum GramOrCov {
    Cov(Array2<f64>),
    Gram(Array2<f64>),
}

/// Project rows onto the principal components: `(X - mean) . components^T`.
pub fn pca_transform(x: &FeatureMatrix, model: &PcaModel) -> Result<FeatureMatrix> {
    if x.cols() != model.mean.len() {
        return Err(Error::ShapeMismatch(format!(
            "pca_transform: {} columns vs model with {}",
            x.cols(),
            model.mean.len()
        )));
    }
    let centered = &x.data - &model.mean.view().insert_axis(ndarray::Axis(0));
    let z = centered.dot(&model.components.t());
    let names = (0..model.n_components()).map(|i| format!("pc{i}")).collect();
    Ok(FeatureMatrix::new(z, NormState::Reduced, names))
}

/// Map reduced rows back to the original feature space:
/// `z . components + mean`.
pub fn pca_reconstruct(z: &Array2<f64>, model: &PcaModel) -> Result<Array2<f64>> {
    if z.ncols() != model.n_components() {
        return Err(Error::ShapeMismatch(format!(
            "pca_reconstruct: {} columns vs {} components",
            z.ncols(),
            model.n_components()
        )));
    }
    Ok(z.dot(&model.components) + model.mean.view().insert_axis(ndarray::Axis(0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::NormState;
    use ndarray::Array2;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn fm(data: Array2<f64>) -> FeatureMatrix {
        let names = (0..data.ncols()).map(|i| format!("f{i}")).collect();
        FeatureMatrix::new(data, NormState::Tfidf, names)
    }

    #[test]
    fn collinear_data_needs_one_component() {
        let data = Array2::from_shape_vec(
            (4, 2),
            vec![0.0, 0.0, 1.0, 2.0, 2.0, 4.0, 3.0, 6.0],
        )
        .unwrap();
        let m = pca_fit(&fm(data), 0.99).unwrap();
        assert_eq!(m.n_components(), 1);
        assert!((m.explained_variance_ratio[0] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn isotropic_data_needs_both_components() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut data = Array2::<f64>::zeros((200, 2));
        for i in 0..200 {
            // Box-Muller
            let u1: f64 = rng.gen::<f64>().max(1e-12);
            let u2: f64 = rng.gen();
            let r = (-2.0 * u1.ln()).sqrt();
            data[[i, 0]] = r * (2.0 * std::f64::consts::PI * u2).cos();
            data[[i, 1]] = r * (2.0 * std::f64::consts::PI * u2).sin();
        }
        let m = pca_fit(&fm(data), 0.99).unwrap();
        assert_eq!(m.n_components(), 2);
    }

    #[test]
    fn components_are_orthonormal() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let data = Array2::from_shape_fn((30, 8), |_| rng.gen::<f64>());
        let m = pca_fit(&fm(data), 0.95).unwrap();
        let g = m.components.dot(&m.components.t());
        for i in 0..m.n_components() {
            for j in 0..m.n_components() {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((g[[i, j]] - expect).abs() < 1e-6);
            }
        }
        let sum: f64 = m.explained_variance_ratio.iter().sum();
        assert!(sum <= 1.0 + 1e-9);
    }

    #[test]
    fn gram_route_matches_covariance_route() {
        // wide matrix (d > n) forces the Gram path; a tall slice of the same
        // data exercises the covariance path
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let wide = Array2::from_shape_fn((6, 15), |_| rng.gen::<f64>());
        let m = pca_fit(&fm(wide.clone()), 0.9).unwrap();
        let g = m.components.dot(&m.components.t());
        for i in 0..m.n_components() {
            for j in 0..m.n_components() {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((g[[i, j]] - expect).abs() < 1e-6, "gram route not orthonormal");
            }
        }
        // projecting and reconstructing keeps the retained variance
        let z = pca_transform(&fm(wide.clone()), &m).unwrap();
        let xr = pca_reconstruct(&z.data, &m).unwrap();
        let mean = wide.mean_axis(ndarray::Axis(0)).unwrap();
        let centered = &wide - &mean.view().insert_axis(ndarray::Axis(0));
        let total: f64 = centered.iter().map(|v| v * v).sum();
        let err: f64 = (&wide - &xr).iter().map(|v| v * v).sum();
        assert!(err / total <= 1.0 - 0.9 + 1e-9);
    }

    #[test]
    fn too_few_rows_is_an_error() {
        let data = Array2::from_shape_vec((1, 3), vec![1.0, 2.0, 3.0]).unwrap();
        assert!(matches!(
            pca_fit(&fm(data), 0.99),
            Err(Error::InsufficientData(_))
        ));
    }

    #[test]
    fn zero_variance_data_is_handled() {
        let data = Array2::from_elem((5, 3), 2.5);
        let m = pca_fit(&fm(data.clone()), 0.99).unwrap();
        assert_eq!(m.n_components(), 1);
        let z = pca_transform(&fm(data), &m).unwrap();
        assert!(z.data.iter().all(|v| v.abs() < 1e-12));
    }
}
