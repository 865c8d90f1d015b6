//! Multinomial and Gaussian naive Bayes.

use ndarray::{Array1, Array2, ArrayView2};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Multinomial naive Bayes with additive (Laplace) smoothing. Suited to
/// count-like non-negative features; TF-IDF weights work as fractional
/// counts.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MnbModel {
    pub class_log_prior: [f64; 2],
    /// `2 x d` log conditional probabilities.
    pub feature_log_prob: Array2<f64>,
    pub alpha: f64,
}

/// Gaussian naive Bayes with a variance floor.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GnbModel {
    pub class_log_prior: [f64; 2],
    pub means: Array2<f64>,
    pub variances: Array2<f64>,
    pub var_floor: f64,
}

fn class_counts(y: &[usize]) -> Result<[usize; 2]> {
    let pos = y.iter().filter(|&&l| l == 1).count();
    let neg = y.len() - pos;
    if pos == 0 || neg == 0 {
        return Err(Error::DegenerateLabels);
    }
    Ok([neg, pos])
}

/// Fit multinomial NB: smoothed per-class feature frequencies.
pub fn train_mnb(x: ArrayView2<f64>, y: &[usize], alpha: f64) -> Result<MnbModel> {
    if x.nrows() != y.len() {
        return Err(Error::ShapeMismatch(format!(
            "{} rows vs {} labels",
            x.nrows(),
            y.len()
        )));
    }
    for ((r, c), v) in x.indexed_iter() {
        if *v < 0.0 {
            return Err(Error::NegativeFeature { row: r, col: c });
        }
    }
    let counts = class_counts(y)?;
    let n = y.len() as f64;
    let d = x.ncols();
    let mut totals = Array2::<f64>::zeros((2, d));
    for (i, row) in x.rows().into_iter().enumerate() {
        let cls = y[i];
        for (j, v) in row.iter().enumerate() {
            totals[[cls, j]] += v;
        }
    }
    let mut feature_log_prob = Array2::<f64>::zeros((2, d));
    for cls in 0..2 {
        let class_total: f64 = totals.row(cls).sum();
        let denom = class_total + alpha * d as f64;
        for j in 0..d {
            feature_log_prob[[cls, j]] = ((totals[[cls, j]] + alpha) / denom).ln();
        }
    }
    Ok(MnbModel {
        class_log_prior: [
            (counts[0] as f64 / n).ln(),
            (counts[1] as f64 / n).ln(),
        ],
        feature_log_prob,
        alpha,
    })
}

impl MnbModel {
    /// Per-class unnormalized log posteriors.
    pub fn log_joint(&self, x: ArrayView2<f64>) -> Result<Array2<f64>> {
        if x.ncols() != self.feature_log_prob.ncols() {
            return Err(Error::ShapeMismatch(format!(
                "{} columns vs model with {}",
                x.ncols(),
                self.feature_log_prob.ncols()
            )));
        }
        let n = x.nrows();
        let mut out = Array2::<f64>::zeros((n, 2));
        for (i, row) in x.rows().into_iter().enumerate() {
            for cls in 0..2 {
                let mut acc = self.class_log_prior[cls];
                for (j, v) in row.iter().enumerate() {
                    if *v != 0.0 {
                        acc += v * self.feature_log_prob[[cls, j]];
                    }
                }
                out[[i, cls]] = acc;
            }
        }
        Ok(out)
    }
}

/// Fit Gaussian NB: per-class feature means and floored variances.
pub fn train_gnb(x: ArrayView2<f64>, y: &[usize], var_floor: f64) -> Result<GnbModel> {
    if x.nrows() != y.len() {
        return Err(Error::ShapeMismatch(format!(
            "{} rows vs {} labels",
            x.nrows(),
            y.len()
        )));
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFiniteInput);
    }
    let counts = class_counts(y)?;
    let n = y.len() as f64;
    let d = x.ncols();
    let mut means = Array2::<f64>::zeros((2, d));
    for (i, row) in x.rows().into_iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            means[[y[i], j]] += v;
        }
    }
    for (cls, &count) in counts.iter().enumerate() {
        means.row_mut(cls).mapv_inplace(|v| v / count as f64);
    }
    let mut variances = Array2::<f64>::zeros((2, d));
    for (i, row) in x.rows().into_iter().enumerate() {
        let cls = y[i];
        for (j, v) in row.iter().enumerate() {
            let delta = v - means[[cls, j]];
            variances[[cls, j]] += delta * delta;
        }
    }
    for (cls, &count) in counts.iter().enumerate() {
        variances
            .row_mut(cls)
            .mapv_inplace(|v| (v / count as f64).max(var_floor));
    }
    Ok(GnbModel {
        class_log_prior: [
            (counts[0] as f64 / n).ln(),
            (counts[1] as f64 / n).ln(),
        ],
        means,
        variances,
        var_floor,
    })
}

impl GnbModel {
    pub fn log_joint(&self, x: ArrayView2<f64>) -> Result<Array2<f64>> {
        if x.ncols() != self.means.ncols() {
            return Err(Error::ShapeMismatch(format!(
                "{} columns vs model with {}",
                x.ncols(),
                self.means.ncols()
            )));
        }
        let n = x.nrows();
        let ln_2pi = (2.0 * std::f64::consts::PI).ln();
        let mut out = Array2::<f64>::zeros((n, 2));
        for (i, row) in x.rows().into_iter().enumerate() {
            for cls in 0..2 {
                let mut acc = self.class_log_prior[cls];
                for (j, v) in row.iter().enumerate() {
                    let var = self.variances[[cls, j]];
                    let delta = v - self.means[[cls, j]];
                    acc += -0.5 * (ln_2pi + var.ln()) - delta * delta / (2.0 * var);
                }
                out[[i, cls]] = acc;
            }
        }
        Ok(out)
    }
}

/// Normalize per-class log joints into probabilities via log-sum-exp.
pub fn posteriors_from_log_joint(log_joint: &Array2<f64>) -> Array2<f64> {
    let n = log_joint.nrows();
    let mut out = Array2::<f64>::zeros((n, 2));
    for i in 0..n {
        let a = log_joint[[i, 0]];
        let b = log_joint[[i, 1]];
        let m = a.max(b);
        let za = (a - m).exp();
        let zb = (b - m).exp();
        let z = za + zb;
        out[[i, 0]] = za / z;
        out[[i, 1]] = zb / z;
    }
    out
}

/// Score for ranking: positive-class log-odds.
pub fn log_odds(log_joint: &Array2<f64>) -> Array1<f64> {
    let n = log_joint.nrows();
    Array1::from_shape_fn(n, |i| log_joint[[i, 1]] - log_joint[[i, 0]])
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    /// 4-doc, 3-word corpus with hand-enumerable posteriors.
    fn toy() -> (Array2<f64>, Vec<usize>) {
        let x = array![
            [2.0, 1.0, 0.0],
            [1.0, 2.0, 0.0],
            [0.0, 1.0, 2.0],
            [0.0, 0.0, 3.0],
        ];
        (x, vec![0, 0, 1, 1])
    }

    #[test]
    fn mnb_matches_hand_enumerated_posterior() {
        let (x, y) = toy();
        let m = train_mnb(x.view(), &y, 1.0).unwrap();
        // class 0 totals: w0=3, w1=3, w2=0, total 6; alpha=1, V=3
        // p(w|0) = (3+1)/9, (3+1)/9, (0+1)/9
        // class 1 totals: w0=0, w1=1, w2=5, total 6
        // p(w|1) = (0+1)/9, (1+1)/9, (5+1)/9
        // priors 1/2 each; test doc [1, 0, 1]
        let test = array![[1.0, 0.0, 1.0]];
        let lj = m.log_joint(test.view()).unwrap();
        let expect0 = (0.5f64).ln() + (4.0f64 / 9.0).ln() + (1.0f64 / 9.0).ln();
        let expect1 = (0.5f64).ln() + (1.0f64 / 9.0).ln() + (6.0f64 / 9.0).ln();
        assert!((lj[[0, 0]] - expect0).abs() < 1e-12);
        assert!((lj[[0, 1]] - expect1).abs() < 1e-12);
        let post = posteriors_from_log_joint(&lj);
        let z = expect0.exp() + expect1.exp();
        assert!((post[[0, 1]] - expect1.exp() / z).abs() < 1e-12);
    }

    #[test]
    fn huge_alpha_decides_by_priors_alone() {
        let x = array![
            [5.0, 0.0],
            [4.0, 1.0],
            [3.0, 0.0],
            [0.0, 5.0],
        ];
        let y = vec![0, 0, 0, 1]; // priors favor class 0
        let m = train_mnb(x.view(), &y, 1e12).unwrap();
        let lj = m.log_joint(x.view()).unwrap();
        for i in 0..4 {
            assert!(lj[[i, 0]] > lj[[i, 1]]);
        }
    }

    #[test]
    fn duplicating_docs_preserves_unsmoothed_model() {
        // with alpha = 0 the estimates are pure count ratios, invariant to
        // duplicating every document (all counts kept positive here)
        let x = array![
            [2.0, 1.0],
            [1.0, 2.0],
            [3.0, 1.0],
            [1.0, 3.0],
        ];
        let y = vec![0, 1, 0, 1];
        let doubled_x = ndarray::concatenate![ndarray::Axis(0), x, x];
        let mut doubled_y = y.clone();
        doubled_y.extend_from_slice(&y);
        let a = train_mnb(x.view(), &y, 0.0).unwrap();
        let b = train_mnb(doubled_x.view(), &doubled_y, 0.0).unwrap();
        assert_eq!(a.class_log_prior, b.class_log_prior);
        for (p, q) in a.feature_log_prob.iter().zip(b.feature_log_prob.iter()) {
            assert!((p - q).abs() < 1e-12);
        }
    }

    #[test]
    fn negative_features_are_rejected() {
        let x = array![[1.0, -0.5], [0.0, 1.0]];
        assert!(matches!(
            train_mnb(x.view(), &[0, 1], 1.0),
            Err(Error::NegativeFeature { row: 0, col: 1 })
        ));
    }

    #[test]
    fn mnb_conditionals_sum_to_one() {
        let (x, y) = toy();
        let m = train_mnb(x.view(), &y, 1.0).unwrap();
        for cls in 0..2 {
            let sum: f64 = m.feature_log_prob.row(cls).iter().map(|lp| lp.exp()).sum();
            assert!((sum - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn constant_log_prior_shift_keeps_decisions() {
        let (x, y) = toy();
        let mut m = train_mnb(x.view(), &y, 1.0).unwrap();
        let before: Vec<usize> = {
            let lj = m.log_joint(x.view()).unwrap();
            (0..4).map(|i| usize::from(lj[[i, 1]] > lj[[i, 0]])).collect()
        };
        m.class_log_prior[0] += 3.7;
        m.class_log_prior[1] += 3.7;
        let lj = m.log_joint(x.view()).unwrap();
        let after: Vec<usize> = (0..4).map(|i| usize::from(lj[[i, 1]] > lj[[i, 0]])).collect();
        assert_eq!(before, after);
    }

    #[test]
    fn gnb_symmetric_classes_split_at_zero() {
        let x = array![[-1.2], [-1.0], [-0.8], [0.8], [1.0], [1.2]];
        let y = vec![0, 0, 0, 1, 1, 1];
        let m = train_gnb(x.view(), &y, 1e-9).unwrap();
        let probe = array![[-0.01], [0.01]];
        let lj = m.log_joint(probe.view()).unwrap();
        assert!(lj[[0, 0]] > lj[[0, 1]]);
        assert!(lj[[1, 1]] > lj[[1, 0]]);
    }

    #[test]
    fn gnb_constant_feature_is_floored_not_nan() {
        let x = array![[1.0, 5.0], [2.0, 5.0], [1.5, 5.0], [2.5, 5.0]];
        let y = vec![0, 0, 1, 1];
        let m = train_gnb(x.view(), &y, 1e-9).unwrap();
        assert!(m.variances.iter().all(|v| *v >= 1e-9));
        let lj = m.log_joint(x.view()).unwrap();
        assert!(lj.iter().all(|v| v.is_finite()));
    }

    #[test]
    fn gnb_posterior_matches_closed_form() {
        let x = array![[0.0], [2.0], [10.0], [12.0]];
        let y = vec![0, 0, 1, 1];
        let m = train_gnb(x.view(), &y, 1e-9).unwrap();
        // class 0: mean 1, var 1; class 1: mean 11, var 1; priors 1/2
        let probe = array![[3.0]];
        let lj = m.log_joint(probe.view()).unwrap();
        let g = |v: f64, mu: f64| {
            -0.5 * ((2.0 * std::f64::consts::PI).ln() + 0.0f64.max(1.0f64.ln()))
                - (v - mu) * (v - mu) / 2.0
        };
        let expect0 = (0.5f64).ln() + g(3.0, 1.0);
        let expect1 = (0.5f64).ln() + g(3.0, 11.0);
        assert!((lj[[0, 0]] - expect0).abs() < 1e-12);
        assert!((lj[[0, 1]] - expect1).abs() < 1e-12);
    }
}
