//! Evaluation: confusion metrics, ROC/AUC, stratified cross-validation,
//! learning curves, and decision-threshold tuning.

use ndarray::ArrayView2;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::TrainedModel;

/// Binary confusion counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionCounts {
    #[serde(rename = "tp")]
    pub true_pos: usize,
    #[serde(rename = "fp")]
    pub false_pos: usize,
    #[serde(rename = "tn")]
    pub true_neg: usize,
    #[serde(rename = "fn")]
    pub false_neg: usize,
}

impl ConfusionCounts {
    pub fn total(&self) -> usize {
        self.true_pos + self.false_pos + self.true_neg + self.false_neg
    }
}

pub fn confusion(y_true: &[usize], y_pred: &[usize]) -> Result<ConfusionCounts> {
    if y_true.len() != y_pred.len() {
        return Err(Error::ShapeMismatch(format!(
            "{} labels vs {} predictions",
            y_true.len(),
            y_pred.len()
        )));
    }
    let mut c = ConfusionCounts {
        true_pos: 0,
        false_pos: 0,
        true_neg: 0,
        false_neg: 0,
    };
    for (&t, &p) in y_true.iter().zip(y_pred) {
        match (t, p) {
            (1, 1) => c.true_pos += 1,
            (0, 1) => c.false_pos += 1,
            (0, 0) => c.true_neg += 1,
            _ => c.false_neg += 1,
        }
    }
    Ok(c)
}

/// Precision, recall, and F1. An empty denominator yields 0 with the
/// `degenerate` flag set instead of an error, so fold aggregation stays
/// total.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrfMetrics {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub degenerate: bool,
}

pub fn precision_recall_f1(c: &ConfusionCounts) -> PrfMetrics {
    let mut degenerate = false;
    let p_den = c.true_pos + c.false_pos;
    let r_den = c.true_pos + c.false_neg;
    let precision = if p_den == 0 {
        degenerate = true;
        0.0
    } else {
        c.true_pos as f64 / p_den as f64
    };
    let recall = if r_den == 0 {
        degenerate = true;
        0.0
    } else {
        c.true_pos as f64 / r_den as f64
    };
    let f1 = if precision + recall == 0.0 {
        degenerate = true;
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    };
    PrfMetrics {
        precision,
        recall,
        f1,
        degenerate,
    }
}

pub fn accuracy(c: &ConfusionCounts) -> f64 {
    let n = c.total();
    if n == 0 {
        return 0.0;
    }
    (c.true_pos + c.true_neg) as f64 / n as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RocPoint {
    pub fpr: f64,
    pub tpr: f64,
    pub threshold: f64,
}

/// ROC curve with trapezoid AUC. Points are ordered by descending
/// threshold and bracketed by (0,0) and (1,1); a point's label rule is
/// "positive when score >= threshold".
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RocCurve {
    pub points: Vec<RocPoint>,
    pub auc: f64,
}

pub fn roc_auc(y_true: &[usize], scores: &[f64]) -> Result<RocCurve> {
    if y_true.len() != scores.len() {
        return Err(Error::ShapeMismatch(format!(
            "{} labels vs {} scores",
            y_true.len(),
            scores.len()
        )));
    }
    if scores.iter().any(|s| !s.is_finite()) {
        return Err(Error::NonFiniteInput);
    }
    let pos = y_true.iter().filter(|&&l| l == 1).count();
    let neg = y_true.len() - pos;
    if pos == 0 || neg == 0 {
        return Err(Error::UndefinedRoc);
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].partial_cmp(&scores[a]).unwrap());

    let max_score = scores[order[0]];
    let mut points = vec![RocPoint {
        fpr: 0.0,
        tpr: 0.0,
        threshold: max_score + 1.0,
    }];
    let mut tp = 0usize;
    let mut fp = 0usize;
    let mut i = 0;
    while i < order.len() {
        let s = scores[order[i]];
        while i < order.len() && scores[order[i]] == s {
            if y_true[order[i]] == 1 {
                tp += 1;
            } else {
                fp += 1;
            }
            i += 1;
        }
        points.push(RocPoint {
            fpr: fp as f64 / neg as f64,
            tpr: tp as f64 / pos as f64,
            threshold: s,
        });
    }
    let mut auc = 0.0;
    for w in points.windows(2) {
        auc += (w[1].fpr - w[0].fpr) * (w[1].tpr + w[0].tpr) / 2.0;
    }
    Ok(RocCurve { points, auc })
}

/// Serialize a curve as `fpr,tpr,threshold` CSV.
pub fn roc_to_csv(curve: &RocCurve) -> String {
    let mut out = String::from("fpr,tpr,threshold\n");
    for p in &curve.points {
        out.push_str(&format!("{},{},{}\n", p.fpr, p.tpr, p.threshold));
    }
    out
}

/// Stratified k-fold partition: folds are disjoint, cover every row, differ
/// in size by at most one, and preserve the class ratio within one sample.
pub fn stratified_kfold(y: &[usize], k: usize, seed: u64) -> Result<Vec<Vec<usize>>> {
    let n = y.len();
    if k < 2 || k > n {
        return Err(Error::InvalidK(format!("k = {k} with {n} rows")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut folds: Vec<Vec<usize>> = vec![Vec::new(); k];
    let mut cursor = 0usize;
    for class in [0usize, 1] {
        let mut idx: Vec<usize> = (0..n).filter(|&i| y[i] == class).collect();
        idx.shuffle(&mut rng);
        for i in idx {
            folds[cursor % k].push(i);
            cursor += 1;
        }
    }
    Ok(folds)
}

/// Metrics for one evaluated fold. `auc` is absent when the held-out part
/// contains a single class.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct FoldMetrics {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub accuracy: f64,
    pub auc: Option<f64>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct MetricStats {
    pub mean: f64,
    pub std: f64,
}

fn stats(values: impl Iterator<Item = f64> + Clone) -> MetricStats {
    let n = values.clone().count();
    if n == 0 {
        return MetricStats { mean: 0.0, std: 0.0 };
    }
    let mean = values.clone().sum::<f64>() / n as f64;
    let var = values.map(|v| (v - mean) * (v - mean)).sum::<f64>() / n as f64;
    MetricStats {
        mean,
        std: var.sqrt(),
    }
}

/// K-fold cross-validation result.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CvResult {
    pub k: usize,
    pub seed: u64,
    pub per_fold: Vec<FoldMetrics>,
    pub precision: MetricStats,
    pub recall: MetricStats,
    pub f1: MetricStats,
    pub accuracy: MetricStats,
    pub auc: MetricStats,
    pub fold_indices: Vec<Vec<usize>>,
}

/// Run stratified k-fold CV. For each fold, `fold_fn(train, val)` must fit
/// everything stateful (vocabulary, IDF, PCA, the learner) on the training
/// indices only and return `(predictions, scores)` for the validation
/// indices in order.
pub fn cross_validate<F>(y: &[usize], k: usize, seed: u64, mut fold_fn: F) -> Result<CvResult>
where
    F: FnMut(&[usize], &[usize]) -> Result<(Vec<usize>, Vec<f64>)>,
{
    let folds = stratified_kfold(y, k, seed)?;
    let mut per_fold = Vec::with_capacity(k);
    for held_out in &folds {
        let train: Vec<usize> = (0..y.len()).filter(|i| !held_out.contains(i)).collect();
        let (pred, scores) = fold_fn(&train, held_out)?;
        let truth: Vec<usize> = held_out.iter().map(|&i| y[i]).collect();
        let c = confusion(&truth, &pred)?;
        let prf = precision_recall_f1(&c);
        let auc = roc_auc(&truth, &scores).ok().map(|r| r.auc);
        per_fold.push(FoldMetrics {
            precision: prf.precision,
            recall: prf.recall,
            f1: prf.f1,
            accuracy: accuracy(&c),
            auc,
        });
    }
    Ok(CvResult {
        k,
        seed,
        precision: stats(per_fold.iter().map(|m| m.precision)),
        recall: stats(per_fold.iter().map(|m| m.recall)),
        f1: stats(per_fold.iter().map(|m| m.f1)),
        accuracy: stats(per_fold.iter().map(|m| m.accuracy)),
        auc: stats(per_fold.iter().filter_map(|m| m.auc).collect::<Vec<_>>().into_iter()),
        per_fold,
        fold_indices: folds,
    })
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct LearningCurvePoint {
    pub size: usize,
    pub train: f64,
    pub val: f64,
    /// Overfitting diagnostic: train minus validation metric.
    pub gap: f64,
}

/// Learning curve over growing prefixes of a fixed shuffle.
///
/// The last `val_fraction` of the shuffle is the fixed held-out set; each
/// requested fraction trains on a prefix of the rest. `run(train, val)`
/// returns the metric on both index sets.
pub fn learning_curve<F>(
    n_rows: usize,
    fractions: &[f64],
    val_fraction: f64,
    seed: u64,
    mut run: F,
) -> Result<Vec<LearningCurvePoint>>
where
    F: FnMut(&[usize], &[usize]) -> Result<(f64, f64)>,
{
    if !(val_fraction > 0.0 && val_fraction < 1.0) {
        return Err(Error::InvalidFraction(val_fraction));
    }
    for &f in fractions {
        if !(f > 0.0 && f <= 1.0) {
            return Err(Error::InvalidFraction(f));
        }
    }
    let mut order: Vec<usize> = (0..n_rows).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    order.shuffle(&mut rng);
    let val_count = ((n_rows as f64 * val_fraction).round() as usize).clamp(1, n_rows - 1);
    let (pool, val) = order.split_at(n_rows - val_count);
    let mut out = Vec::with_capacity(fractions.len());
    for &f in fractions {
        let size = ((pool.len() as f64 * f).round() as usize).clamp(1, pool.len());
        let train = &pool[..size];
        let (train_metric, val_metric) = run(train, val)?;
        out.push(LearningCurvePoint {
            size,
            train: train_metric,
            val: val_metric,
            gap: train_metric - val_metric,
        });
    }
    Ok(out)
}

pub fn learning_curve_to_csv(points: &[LearningCurvePoint]) -> String {
    let mut out = String::from("size,train,val\n");
    for p in points {
        out.push_str(&format!("{},{},{}\n", p.size, p.train, p.val));
    }
    out
}

/// Which constraint threshold tuning must satisfy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ThresholdTarget {
    /// Reach at least this recall; precision is maximized by taking the
    /// largest threshold that still meets it.
    Recall(f64),
    /// Reach at least this precision; recall is maximized by taking the
    /// smallest threshold that meets it.
    Precision(f64),
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ThresholdChoice {
    pub threshold: f64,
    pub precision: f64,
    pub recall: f64,
    /// True when the chosen threshold predicts no positives at all.
    pub degenerate_precision: bool,
}

/// Candidate thresholds for a score vector: every unique score plus one
/// value below the minimum (predict-everything-positive). Predictions are
/// positive strictly above the threshold.
pub fn threshold_candidates(scores: &[f64]) -> Vec<f64> {
    let mut c: Vec<f64> = scores.to_vec();
    c.sort_by(|a, b| a.partial_cmp(b).unwrap());
    c.dedup();
    if let Some(&min) = c.first() {
        c.insert(0, min - 1.0);
    }
    c
}

/// Pick a decision threshold on raw scores meeting the target.
pub fn tune_threshold_scores(
    y_true: &[usize],
    scores: &[f64],
    target: ThresholdTarget,
) -> Result<ThresholdChoice> {
    if y_true.len() != scores.len() || y_true.is_empty() {
        return Err(Error::ShapeMismatch(format!(
            "{} labels vs {} scores",
            y_true.len(),
            scores.len()
        )));
    }
    if scores.iter().any(|s| !s.is_finite()) {
        return Err(Error::NonFiniteInput);
    }
    let candidates = threshold_candidates(scores);
    let evaluate = |t: f64| -> (PrfMetrics, bool) {
        let pred: Vec<usize> = scores.iter().map(|&s| usize::from(s > t)).collect();
        let c = confusion(y_true, &pred).expect("equal lengths");
        let no_pos = c.true_pos + c.false_pos == 0;
        (precision_recall_f1(&c), no_pos)
    };
    match target {
        ThresholdTarget::Recall(r_target) => {
            // recall is non-increasing in the threshold, so the largest
            // feasible threshold meets the target with the best precision
            let mut best: Option<(f64, PrfMetrics, bool)> = None;
            let mut best_recall = f64::NEG_INFINITY;
            for &t in &candidates {
                let (m, no_pos) = evaluate(t);
                best_recall = best_recall.max(m.recall);
                if m.recall >= r_target - 1e-12 && best.as_ref().is_none_or(|prev| t > prev.0) {
                    best = Some((t, m, no_pos));
                }
            }
            match best {
                Some((threshold, m, no_pos)) => Ok(ThresholdChoice {
                    threshold,
                    precision: m.precision,
                    recall: m.recall,
                    degenerate_precision: no_pos,
                }),
                None => Err(Error::TargetUnreachable { best: best_recall }),
            }
        }
        ThresholdTarget::Precision(p_target) => {
            let mut best: Option<(f64, PrfMetrics, bool)> = None;
            let mut best_precision = f64::NEG_INFINITY;
            for &t in &candidates {
                let (m, no_pos) = evaluate(t);
                if !no_pos {
                    best_precision = best_precision.max(m.precision);
                }
                if m.precision >= p_target - 1e-12
                    && !no_pos
                    && best.as_ref().is_none_or(|prev| t < prev.0)
                {
                    best = Some((t, m, no_pos));
                }
            }
            match best {
                Some((threshold, m, no_pos)) => Ok(ThresholdChoice {
                    threshold,
                    precision: m.precision,
                    recall: m.recall,
                    degenerate_precision: no_pos,
                }),
                None => Err(Error::TargetUnreachable {
                    best: best_precision.max(0.0),
                }),
            }
        }
    }
}

/// Tune the threshold of a trained model on validation data.
pub fn tune_threshold(
    model: &TrainedModel,
    x_val: ArrayView2<f64>,
    y_val: &[usize],
    target: ThresholdTarget,
) -> Result<ThresholdChoice> {
    let scores = model.predict_score(x_val)?.to_vec();
    tune_threshold_scores(y_val, &scores, target)
}
