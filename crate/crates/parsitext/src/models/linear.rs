//! Linear classifiers trained by stochastic gradient descent: logistic
//! regression and a hinge-loss (SVM) variant with L2 regularization.

use ndarray::{Array1, ArrayView2};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which per-sample loss drives the SGD updates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LossKind {
    Logistic,
    Hinge,
}

/// Trained linear model: `score(x) = w . x + b`.
///
/// For the logistic loss the score is the logit, so the default decision
/// threshold of 0.0 on the score equals 0.5 on the probability; for hinge
/// it is the margin with the conventional 0.0 cut.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LinearModel {
    pub weights: Array1<f64>,
    pub bias: f64,
    pub loss: LossKind,
    pub l2_lambda: f64,
    /// Decision threshold on the score; predictions are positive strictly
    /// above it.
    pub threshold: f64,
    /// Training-score range, kept for min-max rescaling of hinge margins
    /// into approximate probabilities.
    pub score_min: f64,
    pub score_max: f64,
}

/// Training options; the schedule is `eta_t = eta0 / (1 + lambda * t)` with
/// `t` counting individual sample updates.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SgdOptions {
    pub l2_lambda: f64,
    pub epochs: usize,
    pub eta0: f64,
    pub seed: u64,
}

impl Default for SgdOptions {
    fn default() -> Self {
        SgdOptions {
            l2_lambda: 1e-4,
            epochs: 50,
            eta0: 0.1,
            seed: 42,
        }
    }
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

fn check_inputs(x: ArrayView2<f64>, y: &[usize]) -> Result<()> {
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
    let has_pos = y.contains(&1);
    let has_neg = y.contains(&0);
    if !has_pos || !has_neg {
        return Err(Error::DegenerateLabels);
    }
    Ok(())
}

/// Train a linear model with SGD over shuffled samples.
pub fn train_linear(
    x: ArrayView2<f64>,
    y: &[usize],
    loss: LossKind,
    opts: &SgdOptions,
) -> Result<LinearModel> {
    check_inputs(x, y)?;
    let n = x.nrows();
    let d = x.ncols();
    let lambda = opts.l2_lambda;
    let mut w = Array1::<f64>::zeros(d);
    let mut b = 0.0f64;
    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut t: u64 = 0;

    for _epoch in 0..opts.epochs {
        order.shuffle(&mut rng);
        for &i in &order {
            t += 1;
            let eta = opts.eta0 / (1.0 + lambda * t as f64);
            let target = if y[i] == 1 { 1.0 } else { -1.0 };
            let row = x.row(i);
            let z = row.dot(&w) + b;
            match loss {
                LossKind::Logistic => {
                    // d/dz log(1 + exp(-target z)) = -target * sigmoid(-target z)
                    let g = -target * sigmoid(-target * z);
                    for (wj, xj) in w.iter_mut().zip(row.iter()) {
                        *wj -= eta * (g * xj + lambda * *wj);
                    }
                    b -= eta * g;
                }
                LossKind::Hinge => {
                    let shrink = (1.0 - eta * lambda).max(0.0);
                    w.mapv_inplace(|wj| wj * shrink);
                    if target * z < 1.0 {
                        for (wj, xj) in w.iter_mut().zip(row.iter()) {
                            *wj += eta * target * xj;
                        }
                        b += eta * target;
                    }
                }
            }
        }
    }

    let mut score_min = f64::INFINITY;
    let mut score_max = f64::NEG_INFINITY;
    for i in 0..n {
        let z = x.row(i).dot(&w) + b;
        score_min = score_min.min(z);
        score_max = score_max.max(z);
    }

    Ok(LinearModel {
        weights: w,
        bias: b,
        loss,
        l2_lambda: lambda,
        threshold: 0.0,
        score_min,
        score_max,
    })
}

impl LinearModel {
    pub fn score_rows(&self, x: ArrayView2<f64>) -> Result<Array1<f64>> {
        if x.ncols() != self.weights.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} columns vs model with {}",
                x.ncols(),
                self.weights.len()
            )));
        }
        Ok(x.dot(&self.weights) + self.bias)
    }

    /// Probability of the positive class. Logistic scores pass through the
    /// sigmoid; hinge margins are min-max rescaled over the training range,
    /// which is approximate by construction.
    pub fn proba_pos(&self, score: f64) -> f64 {
        match self.loss {
            LossKind::Logistic => sigmoid(score),
            LossKind::Hinge => {
                let span = self.score_max - self.score_min;
                if span <= 0.0 {
                    0.5
                } else {
                    ((score - self.score_min) / span).clamp(0.0, 1.0)
                }
            }
        }
    }
}

/// Full-objective value: average per-sample loss plus `lambda ||w||^2 / 2`.
pub fn linear_objective(
    x: ArrayView2<f64>,
    y: &[usize],
    w: &Array1<f64>,
    b: f64,
    loss: LossKind,
    lambda: f64,
) -> f64 {
    let n = x.nrows() as f64;
    let mut total = 0.0;
    for (i, row) in x.rows().into_iter().enumerate() {
        let target = if y[i] == 1 { 1.0 } else { -1.0 };
        let z = row.dot(w) + b;
        total += match loss {
            LossKind::Logistic => {
                // log(1 + exp(-tz)) computed stably
                let m = -target * z;
                if m > 0.0 {
                    m + (1.0 + (-m).exp()).ln()
                } else {
                    (1.0 + m.exp()).ln()
                }
            }
            LossKind::Hinge => (1.0 - target * z).max(0.0),
        };
    }
    total / n + lambda * w.dot(w) / 2.0
}

/// Analytic gradient of [`linear_objective`] for the logistic loss, in
/// `(d/dw, d/db)` form. Used for finite-difference checks.
pub fn logistic_gradient(
    x: ArrayView2<f64>,
    y: &[usize],
    w: &Array1<f64>,
    b: f64,
    lambda: f64,
) -> (Array1<f64>, f64) {
    let n = x.nrows() as f64;
    let mut gw = Array1::<f64>::zeros(w.len());
    let mut gb = 0.0;
    for (i, row) in x.rows().into_iter().enumerate() {
        let target = if y[i] == 1 { 1.0 } else { -1.0 };
        let z = row.dot(w) + b;
        let g = -target * sigmoid(-target * z);
        for (gj, xj) in gw.iter_mut().zip(row.iter()) {
            *gj += g * xj / n;
        }
        gb += g / n;
    }
    for (gj, wj) in gw.iter_mut().zip(w.iter()) {
        *gj += lambda * wj;
    }
    (gw, gb)
}
