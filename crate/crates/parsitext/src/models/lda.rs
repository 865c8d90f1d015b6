//! Fisher linear discriminant analysis for two classes.

use ndarray::{Array1, Array2, ArrayView2};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::solve_spd;

/// Fitted discriminant: `score(x) = w . x - threshold`, positive above the
/// midpoint of the projected class means.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LdaModel {
    pub mean0: Array1<f64>,
    pub mean1: Array1<f64>,
    pub w: Array1<f64>,
    /// Projected-space decision point: `w . (mean0 + mean1) / 2`.
    pub threshold: f64,
    /// Pooled within-class standard deviation along `w`, used to scale the
    /// sigmoid when a probability is needed.
    pub projected_std: f64,
    pub ridge: f64,
}

/// Fit LDA: `w = (S_W + ridge I)^-1 (mean1 - mean0)` with the within-class
/// scatter `S_W`. Each class needs at least two samples.
pub fn train_lda(x: ArrayView2<f64>, y: &[usize], ridge: f64) -> Result<LdaModel> {
    let n = x.nrows();
    if n != y.len() {
        return Err(Error::ShapeMismatch(format!(
            "{} rows vs {} labels",
            n,
            y.len()
        )));
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFiniteInput);
    }
    let d = x.ncols();
    let counts = [
        y.iter().filter(|&&l| l == 0).count(),
        y.iter().filter(|&&l| l == 1).count(),
    ];
    if counts[0] < 2 || counts[1] < 2 {
        return Err(Error::InsufficientData(format!(
            "lda needs >= 2 samples per class, got {} and {}",
            counts[0], counts[1]
        )));
    }

    let mut means = [Array1::<f64>::zeros(d), Array1::<f64>::zeros(d)];
    for (i, row) in x.rows().into_iter().enumerate() {
        means[y[i]] += &row;
    }
    for cls in 0..2 {
        means[cls].mapv_inplace(|v| v / counts[cls] as f64);
    }

    let mut scatter = Array2::<f64>::zeros((d, d));
    for (i, row) in x.rows().into_iter().enumerate() {
        let mu = &means[y[i]];
        for a in 0..d {
            let da = row[a] - mu[a];
            for b in a..d {
                let v = da * (row[b] - mu[b]);
                scatter[[a, b]] += v;
                if a != b {
                    scatter[[b, a]] += v;
                }
            }
        }
    }

    let diff = &means[1] - &means[0];
    let mut lam = ridge.max(f64::MIN_POSITIVE);
    let w = loop {
        let mut a = scatter.clone();
        for i in 0..d {
            a[[i, i]] += lam;
        }
        if let Some(sol) = solve_spd(&a, &diff) {
            break sol;
        }
        lam *= 10.0; // scatter numerically indefinite; strengthen the ridge
        if lam > 1e12 {
            return Err(Error::InsufficientData(
                "lda scatter could not be regularized".into(),
            ));
        }
    };

    let threshold = w.dot(&(&means[0] + &means[1])) / 2.0;
    let within = w.dot(&scatter.dot(&w)) / (n as f64 - 2.0);
    let projected_std = within.max(0.0).sqrt().max(1e-12);
    let [mean0, mean1] = means;
    Ok(LdaModel {
        mean0,
        mean1,
        w,
        threshold,
        projected_std,
        ridge,
    })
}

impl LdaModel {
    pub fn score_rows(&self, x: ArrayView2<f64>) -> Result<Array1<f64>> {
        if x.ncols() != self.w.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} columns vs model with {}",
                x.ncols(),
                self.w.len()
            )));
        }
        Ok(x.dot(&self.w) - self.threshold)
    }

    /// Sigmoid of the scaled signed distance to the decision point.
    pub fn proba_pos(&self, score: f64) -> f64 {
        let z = score / self.projected_std;
        if z >= 0.0 {
            1.0 / (1.0 + (-z).exp())
        } else {
            let e = z.exp();
            e / (1.0 + e)
        }
    }

    /// Fisher criterion of a direction on the data this model was built
    /// from: between-class separation over within-class spread.
    pub fn fisher_criterion(x: ArrayView2<f64>, y: &[usize], dir: &Array1<f64>) -> f64 {
        let d = x.ncols();
        let mut sums = [vec![0.0; d], vec![0.0; d]];
        let mut counts = [0usize; 2];
        for (i, row) in x.rows().into_iter().enumerate() {
            counts[y[i]] += 1;
            for j in 0..d {
                sums[y[i]][j] += row[j];
            }
        }
        let proj = |v: &[f64]| -> f64 { v.iter().zip(dir.iter()).map(|(a, b)| a * b).sum() };
        let m0 = proj(&sums[0]) / counts[0] as f64;
        let m1 = proj(&sums[1]) / counts[1] as f64;
        let mut within = 0.0;
        for (i, row) in x.rows().into_iter().enumerate() {
            let p: f64 = row.iter().zip(dir.iter()).map(|(a, b)| a * b).sum();
            let m = if y[i] == 0 { m0 } else { m1 };
            within += (p - m) * (p - m);
        }
        if within <= 0.0 {
            return f64::INFINITY;
        }
        (m1 - m0) * (m1 - m0) / within
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::test_fixtures::blobs;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn spherical_classes_give_w_parallel_to_mean_difference() {
        let (x, y) = blobs(50, 31);
        let m = train_lda(x.view(), &y, 1e-6).unwrap();
        let diff = &m.mean1 - &m.mean0;
        let cos = m.w.dot(&diff)
            / (m.w.dot(&m.w).sqrt() * diff.dot(&diff).sqrt());
        assert!(cos > 0.999, "cos = {cos}");
    }

    #[test]
    fn fisher_criterion_beats_random_directions() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let n = 60;
        let mut x = ndarray::Array2::<f64>::zeros((n, 2));
        let mut y = Vec::new();
        for i in 0..n {
            let label = i % 2;
            // anisotropic noise makes the optimal direction non-obvious
            let cx = if label == 1 { 1.0 } else { -1.0 };
            x[[i, 0]] = cx + rng.gen_range(-0.2..0.2);
            x[[i, 1]] = rng.gen_range(-3.0..3.0);
            y.push(label);
        }
        let m = train_lda(x.view(), &y, 1e-6).unwrap();
        let ours = LdaModel::fisher_criterion(x.view(), &y, &m.w);
        for _ in 0..1000 {
            let dir = ndarray::Array1::from_shape_fn(2, |_| rng.gen_range(-1.0..1.0));
            if dir.dot(&dir) < 1e-6 {
                continue;
            }
            let theirs = LdaModel::fisher_criterion(x.view(), &y, &dir);
            assert!(ours >= theirs - 1e-9, "{ours} < {theirs}");
        }
    }

    #[test]
    fn swapping_labels_flips_decisions() {
        let (x, y) = blobs(20, 8);
        let flipped: Vec<usize> = y.iter().map(|&l| 1 - l).collect();
        let a = train_lda(x.view(), &y, 1e-6).unwrap();
        let b = train_lda(x.view(), &flipped, 1e-6).unwrap();
        let sa = a.score_rows(x.view()).unwrap();
        let sb = b.score_rows(x.view()).unwrap();
        for (p, q) in sa.iter().zip(sb.iter()) {
            assert!((p + q).abs() < 1e-9, "{p} vs {q}");
        }
    }

    #[test]
    fn small_classes_are_rejected() {
        let x = ndarray::array![[0.0, 0.0], [1.0, 1.0], [2.0, 2.0]];
        assert!(matches!(
            train_lda(x.view(), &[0, 1, 1], 1e-6),
            Err(Error::InsufficientData(_))
        ));
    }

    #[test]
    fn separates_blobs_perfectly() {
        let (x, y) = blobs(30, 12);
        let m = train_lda(x.view(), &y, 1e-6).unwrap();
        let scores = m.score_rows(x.view()).unwrap();
        for (s, &l) in scores.iter().zip(&y) {
            assert_eq!(usize::from(*s > 0.0), l);
        }
    }
}
