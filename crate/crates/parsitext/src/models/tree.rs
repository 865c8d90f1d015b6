//! CART decision trees, random forests with Gini feature importances, and
//! the depth-1 stumps used for boosting.

use ndarray::ArrayView2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A node of a fitted tree; indices point into the owning tree's arena.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub enum TreeNode {
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
    Leaf {
        counts: [f64; 2],
    },
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct DecisionTree {
    pub nodes: Vec<TreeNode>,
}

impl DecisionTree {
    /// Class counts at the leaf this row falls into.
    pub fn leaf_counts(&self, row: &[f64]) -> [f64; 2] {
        let mut i = 0;
        loop {
            match &self.nodes[i] {
                TreeNode::Leaf { counts } => return *counts,
                TreeNode::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    i = if row[*feature] <= *threshold {
                        *left
                    } else {
                        *right
                    };
                }
            }
        }
    }

    /// Majority vote at the leaf; ties go to class 0.
    pub fn predict_row(&self, row: &[f64]) -> usize {
        let c = self.leaf_counts(row);
        usize::from(c[1] > c[0])
    }
}

/// How many features each split considers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MaxFeatures {
    Sqrt,
    All,
    Fixed(usize),
}

impl MaxFeatures {
    fn resolve(&self, d: usize) -> usize {
        match self {
            MaxFeatures::Sqrt => ((d as f64).sqrt().ceil() as usize).clamp(1, d),
            MaxFeatures::All => d,
            MaxFeatures::Fixed(m) => (*m).clamp(1, d),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ForestOptions {
    pub n_trees: usize,
    pub max_depth: Option<usize>,
    pub max_features: MaxFeatures,
    pub bootstrap: bool,
    pub seed: u64,
}

impl Default for ForestOptions {
    fn default() -> Self {
        ForestOptions {
            n_trees: 100,
            max_depth: None,
            max_features: MaxFeatures::Sqrt,
            bootstrap: true,
            seed: 42,
        }
    }
}

/// A fitted random forest.
///
/// `feature_importances` is the normalized sum over all split nodes of
/// `(node sample count / total samples) * impurity decrease`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ForestModel {
    pub trees: Vec<DecisionTree>,
    pub options: ForestOptions,
    pub feature_importances: Vec<f64>,
    pub n_features: usize,
}

fn gini(c0: f64, c1: f64) -> f64 {
    let n = c0 + c1;
    if n <= 0.0 {
        return 0.0;
    }
    1.0 - (c0 * c0 + c1 * c1) / (n * n)
}

struct BestSplit {
    feature: usize,
    threshold: f64,
    weighted_gini: f64,
}

/// Best Gini split over the given features; ties resolve to the lowest
/// feature id, then the lowest threshold. Thresholds sit at midpoints of
/// consecutive distinct values.
fn best_split(
    x: ArrayView2<f64>,
    y: &[usize],
    weights: &[f64],
    indices: &[usize],
    features: &[usize],
) -> Option<BestSplit> {
    let mut best: Option<BestSplit> = None;
    let total0: f64 = indices
        .iter()
        .filter(|&&i| y[i] == 0)
        .map(|&i| weights[i])
        .sum();
    let total1: f64 = indices
        .iter()
        .filter(|&&i| y[i] == 1)
        .map(|&i| weights[i])
        .sum();
    let total = total0 + total1;
    if total <= 0.0 {
        return None;
    }
    for &f in features {
        let mut vals: Vec<(f64, usize)> = indices.iter().map(|&i| (x[[i, f]], i)).collect();
        vals.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        let mut left0 = 0.0;
        let mut left1 = 0.0;
        for w in 0..vals.len() - 1 {
            let (v, i) = vals[w];
            if y[i] == 0 {
                left0 += weights[i];
            } else {
                left1 += weights[i];
            }
            let next_v = vals[w + 1].0;
            if next_v <= v {
                continue; // same value, no boundary here
            }
            let threshold = v + (next_v - v) / 2.0;
            let right0 = total0 - left0;
            let right1 = total1 - left1;
            let ln = left0 + left1;
            let rn = right0 + right1;
            let wg = (ln * gini(left0, left1) + rn * gini(right0, right1)) / total;
            let better = match &best {
                None => true,
                Some(b) => {
                    wg < b.weighted_gini - 1e-12
                        || ((wg - b.weighted_gini).abs() <= 1e-12
                            && (f < b.feature
                                || (f == b.feature && threshold < b.threshold)))
                }
            };
            if better {
                best = Some(BestSplit {
                    feature: f,
                    threshold,
                    weighted_gini: wg,
                });
            }
        }
    }
    best
}

struct TreeBuilder<'a, 'b> {
    x: ArrayView2<'a, f64>,
    y: &'b [usize],
    weights: Vec<f64>,
    max_depth: Option<usize>,
    n_subset: usize,
    n_total: f64,
    nodes: Vec<TreeNode>,
    importances: Vec<f64>,
}

impl TreeBuilder<'_, '_> {
    fn grow(&mut self, indices: Vec<usize>, depth: usize, rng: &mut ChaCha8Rng) -> usize {
        let c0: f64 = indices
            .iter()
            .filter(|&&i| self.y[i] == 0)
            .map(|&i| self.weights[i])
            .sum();
        let c1: f64 = indices
            .iter()
            .filter(|&&i| self.y[i] == 1)
            .map(|&i| self.weights[i])
            .sum();
        let node_gini = gini(c0, c1);
        let at_depth_limit = self.max_depth.is_some_and(|m| depth >= m);
        if at_depth_limit || node_gini <= 0.0 || indices.len() < 2 {
            return self.push_leaf(c0, c1);
        }
        let d = self.x.ncols();
        let features = sample_features(d, self.n_subset, rng);
        let split = match best_split(self.x, self.y, &self.weights, &indices, &features) {
            Some(s) => s,
            None => return self.push_leaf(c0, c1),
        };
        let decrease = node_gini - split.weighted_gini;
        if decrease <= 1e-12 {
            return self.push_leaf(c0, c1);
        }
        self.importances[split.feature] += (c0 + c1) / self.n_total * decrease;
        let (left_idx, right_idx): (Vec<usize>, Vec<usize>) = indices
            .into_iter()
            .partition(|&i| self.x[[i, split.feature]] <= split.threshold);
        let node = self.nodes.len();
        self.nodes.push(TreeNode::Leaf { counts: [0.0, 0.0] }); // placeholder
        let left = self.grow(left_idx, depth + 1, rng);
        let right = self.grow(right_idx, depth + 1, rng);
        self.nodes[node] = TreeNode::Split {
            feature: split.feature,
            threshold: split.threshold,
            left,
            right,
        };
        node
    }

    fn push_leaf(&mut self, c0: f64, c1: f64) -> usize {
        self.nodes.push(TreeNode::Leaf { counts: [c0, c1] });
        self.nodes.len() - 1
    }
}

/// Sample `m` distinct feature ids, returned in ascending order so tie
/// breaking stays deterministic.
fn sample_features(d: usize, m: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    if m >= d {
        return (0..d).collect();
    }
    let mut pool: Vec<usize> = (0..d).collect();
    for i in 0..m {
        let j = rng.gen_range(i..d);
        pool.swap(i, j);
    }
    let mut picked = pool[..m].to_vec();
    picked.sort_unstable();
    picked
}

/// Train a random forest of Gini CART trees on bootstrap samples.
pub fn train_random_forest(
    x: ArrayView2<f64>,
    y: &[usize],
    opts: &ForestOptions,
) -> Result<ForestModel> {
    let n = x.nrows();
    if n != y.len() {
        return Err(Error::ShapeMismatch(format!(
            "{} rows vs {} labels",
            n,
            y.len()
        )));
    }
    if n < 2 {
        return Err(Error::InsufficientData(format!(
            "forest needs at least 2 samples, got {n}"
        )));
    }
    if y.iter().all(|&l| l == 1) || y.iter().all(|&l| l == 0) {
        return Err(Error::DegenerateLabels);
    }
    let d = x.ncols();
    let n_subset = opts.max_features.resolve(d.max(1));
    let mut master = ChaCha8Rng::seed_from_u64(opts.seed);
    let tree_seeds: Vec<u64> = (0..opts.n_trees).map(|_| master.gen()).collect();

    let mut trees = Vec::with_capacity(opts.n_trees);
    let mut importances = vec![0.0; d];
    for seed in tree_seeds {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let indices: Vec<usize> = if opts.bootstrap {
            (0..n).map(|_| rng.gen_range(0..n)).collect()
        } else {
            (0..n).collect()
        };
        let mut builder = TreeBuilder {
            x,
            y,
            weights: vec![1.0; n],
            max_depth: opts.max_depth,
            n_subset,
            n_total: indices.len() as f64,
            nodes: Vec::new(),
            importances: vec![0.0; d],
        };
        builder.grow(indices, 0, &mut rng);
        for (acc, v) in importances.iter_mut().zip(&builder.importances) {
            *acc += v;
        }
        trees.push(DecisionTree {
            nodes: builder.nodes,
        });
    }
    let total: f64 = importances.iter().sum();
    if total > 0.0 {
        for v in &mut importances {
            *v /= total;
        }
    }
    Ok(ForestModel {
        trees,
        options: opts.clone(),
        feature_importances: importances,
        n_features: d,
    })
}

impl ForestModel {
    /// Fraction of trees voting for the positive class, per row.
    pub fn vote_fractions(&self, x: ArrayView2<f64>) -> Result<Vec<f64>> {
        if x.ncols() != self.n_features {
            return Err(Error::ShapeMismatch(format!(
                "{} columns vs forest with {}",
                x.ncols(),
                self.n_features
            )));
        }
        let mut out = Vec::with_capacity(x.nrows());
        let mut row_buf = vec![0.0; self.n_features];
        for row in x.rows() {
            for (b, v) in row_buf.iter_mut().zip(row.iter()) {
                *b = *v;
            }
            let votes = self
                .trees
                .iter()
                .filter(|t| t.predict_row(&row_buf) == 1)
                .count();
            out.push(votes as f64 / self.trees.len() as f64);
        }
        Ok(out)
    }
}

/// A depth-1 tree: one split (or none) with weighted class counts per side.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct StumpModel {
    /// `None` when no useful split exists; everything lands in `left`.
    pub split: Option<(usize, f64)>,
    pub left: [f64; 2],
    pub right: [f64; 2],
}

impl StumpModel {
    pub fn side_counts(&self, row: &[f64]) -> [f64; 2] {
        match self.split {
            Some((f, t)) if row[f] > t => self.right,
            _ => self.left,
        }
    }

    pub fn predict_row(&self, row: &[f64]) -> usize {
        let c = self.side_counts(row);
        usize::from(c[1] > c[0])
    }

    pub fn proba_pos_row(&self, row: &[f64]) -> f64 {
        let c = self.side_counts(row);
        let n = c[0] + c[1];
        if n <= 0.0 {
            0.5
        } else {
            c[1] / n
        }
    }
}

/// Exhaustive weighted-Gini stump: every feature, every midpoint between
/// distinct sorted values; ties resolve to the lowest feature id then the
/// lowest threshold. Uniform labels produce a leaf-only stump.
pub fn train_stump(
    x: ArrayView2<f64>,
    y: &[usize],
    sample_weights: Option<&[f64]>,
) -> Result<StumpModel> {
    let n = x.nrows();
    if n != y.len() {
        return Err(Error::ShapeMismatch(format!(
            "{} rows vs {} labels",
            n,
            y.len()
        )));
    }
    if n == 0 {
        return Err(Error::DegenerateLabels);
    }
    let weights: Vec<f64> = match sample_weights {
        Some(w) => {
            if w.len() != n {
                return Err(Error::ShapeMismatch(format!(
                    "{} rows vs {} weights",
                    n,
                    w.len()
                )));
            }
            if w.iter().any(|v| *v < 0.0) || w.iter().sum::<f64>() <= 0.0 {
                return Err(Error::InvalidConfig(
                    "sample weights must be non-negative with positive sum".into(),
                ));
            }
            w.to_vec()
        }
        None => vec![1.0; n],
    };
    let indices: Vec<usize> = (0..n).collect();
    let features: Vec<usize> = (0..x.ncols()).collect();
    let c0: f64 = indices
        .iter()
        .filter(|&&i| y[i] == 0)
        .map(|&i| weights[i])
        .sum();
    let c1: f64 = indices
        .iter()
        .filter(|&&i| y[i] == 1)
        .map(|&i| weights[i])
        .sum();
    let split = best_split(x, y, &weights, &indices, &features);
    match split {
        Some(s) if gini(c0, c1) - s.weighted_gini > 1e-12 => {
            let mut left = [0.0, 0.0];
            let mut right = [0.0, 0.0];
            for &i in &indices {
                let side = if x[[i, s.feature]] <= s.threshold {
                    &mut left
                } else {
                    &mut right
                };
                side[y[i]] += weights[i];
            }
            Ok(StumpModel {
                split: Some((s.feature, s.threshold)),
                left,
                right,
            })
        }
        _ => Ok(StumpModel {
            split: None,
            left: [c0, c1],
            right: [0.0, 0.0],
        }),
    }
}

/// Weighted misclassification of a stump; the AdaBoost round error.
pub fn stump_weighted_error(
    stump: &StumpModel,
    x: ArrayView2<f64>,
    y: &[usize],
    weights: &[f64],
) -> f64 {
    let mut err = 0.0;
    let mut row_buf = vec![0.0; x.ncols()];
    for (i, row) in x.rows().into_iter().enumerate() {
        for (b, v) in row_buf.iter_mut().zip(row.iter()) {
            *b = *v;
        }
        if stump.predict_row(&row_buf) != y[i] {
            err += weights[i];
        }
    }
    err
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::{array, Array2};

    #[test]
    fn one_dimensional_stump_splits_at_zero() {
        let x = array![[-1.0], [1.0]];
        let y = vec![0, 1];
        let s = train_stump(x.view(), &y, None).unwrap();
        let (f, t) = s.split.unwrap();
        assert_eq!(f, 0);
        assert!((t - 0.0).abs() < 1e-12);
        assert_eq!(s.predict_row(&[-0.5]), 0);
        assert_eq!(s.predict_row(&[0.5]), 1);
    }

    #[test]
    fn stump_beats_every_candidate_by_brute_force() {
        let x = array![
            [0.1, 5.0, -1.0],
            [0.9, 4.0, -0.5],
            [0.2, 3.0, 0.0],
            [0.8, 2.0, 0.5],
            [0.3, 1.0, 1.0],
            [0.7, 0.5, 1.5],
            [0.4, 0.2, 2.0],
            [0.6, 0.1, 2.5],
            [0.45, 6.0, 3.0],
            [0.55, 7.0, 3.5],
        ];
        let y = vec![0, 1, 0, 1, 0, 1, 0, 1, 0, 1];
        let w = vec![1.0, 2.0, 1.0, 0.5, 1.0, 1.5, 1.0, 1.0, 2.0, 0.5];
        let s = train_stump(x.view(), &y, Some(&w)).unwrap();
        let err_model = stump_weighted_error(&s, x.view(), &y, &w);
        // brute force over all (feature, midpoint, polarity) candidates
        let mut best = f64::INFINITY;
        for f in 0..3 {
            let mut vals: Vec<f64> = (0..10).map(|i| x[[i, f]]).collect();
            vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
            vals.dedup();
            for p in vals.windows(2) {
                let t = (p[0] + p[1]) / 2.0;
                for flip in [false, true] {
                    let mut err = 0.0;
                    for i in 0..10 {
                        let pred = usize::from((x[[i, f]] > t) != flip);
                        if pred != y[i] {
                            err += w[i];
                        }
                    }
                    best = best.min(err);
                }
            }
        }
        assert!(
            err_model <= best + 1e-9,
            "stump error {err_model} vs brute force {best}"
        );
    }

    #[test]
    fn uniform_labels_give_leaf_stump() {
        let x = array![[1.0], [2.0], [3.0]];
        let y = vec![1, 1, 1];
        let s = train_stump(x.view(), &y, None).unwrap();
        assert!(s.split.is_none());
        assert_eq!(s.predict_row(&[99.0]), 1);
    }

    fn blobs() -> (Array2<f64>, Vec<usize>) {
        crate::test_fixtures::blobs(30, 21)
    }

    #[test]
    fn forest_separates_blobs() {
        let (x, y) = blobs();
        let opts = ForestOptions {
            n_trees: 20,
            ..Default::default()
        };
        let m = train_random_forest(x.view(), &y, &opts).unwrap();
        let votes = m.vote_fractions(x.view()).unwrap();
        for (v, &l) in votes.iter().zip(&y) {
            assert_eq!(usize::from(*v > 0.5), l);
        }
    }

    #[test]
    fn informative_feature_dominates_importances() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let n = 200;
        let mut x = Array2::<f64>::zeros((n, 10));
        let mut y = Vec::with_capacity(n);
        for i in 0..n {
            let label = i % 2;
            x[[i, 0]] = label as f64; // feature 0 is the label
            for j in 1..10 {
                x[[i, j]] = rng.gen::<f64>();
            }
            y.push(label);
        }
        let opts = ForestOptions {
            n_trees: 30,
            ..Default::default()
        };
        let m = train_random_forest(x.view(), &y, &opts).unwrap();
        let imp = &m.feature_importances;
        for j in 1..10 {
            assert!(
                imp[0] > imp[j],
                "importance of informative feature {} vs noise {} = {}",
                imp[0],
                j,
                imp[j]
            );
        }
        let sum: f64 = imp.iter().sum();
        assert!((sum - 1.0).abs() < 1e-9);
        assert!(imp.iter().all(|v| *v >= 0.0));
    }

    #[test]
    fn depth_zero_is_the_majority_predictor() {
        let x = array![[0.0], [1.0], [2.0], [3.0], [4.0]];
        let y = vec![1, 1, 1, 0, 0];
        let opts = ForestOptions {
            n_trees: 5,
            max_depth: Some(0),
            bootstrap: false,
            ..Default::default()
        };
        let m = train_random_forest(x.view(), &y, &opts).unwrap();
        let votes = m.vote_fractions(x.view()).unwrap();
        assert!(votes.iter().all(|&v| v == 1.0));
    }

    #[test]
    fn unbounded_depth_memorizes_the_training_set() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let n = 100;
        let x = Array2::from_shape_fn((n, 4), |_| rng.gen::<f64>());
        let y: Vec<usize> = (0..n).map(|_| rng.gen_range(0..2)).collect();
        if y.iter().all(|&l| l == y[0]) {
            return; // astronomically unlikely with this seed
        }
        let opts = ForestOptions {
            n_trees: 100,
            max_depth: None,
            ..Default::default()
        };
        let m = train_random_forest(x.view(), &y, &opts).unwrap();
        let votes = m.vote_fractions(x.view()).unwrap();
        let correct = votes
            .iter()
            .zip(&y)
            .filter(|(v, &l)| usize::from(**v > 0.5) == l)
            .count();
        assert_eq!(correct, n, "pure-noise training data must be memorized");
    }

    #[test]
    fn same_seed_same_forest() {
        let (x, y) = blobs();
        let opts = ForestOptions {
            n_trees: 8,
            ..Default::default()
        };
        let a = train_random_forest(x.view(), &y, &opts).unwrap();
        let b = train_random_forest(x.view(), &y, &opts).unwrap();
        assert_eq!(
            serde_json::to_string(&a.trees).unwrap(),
            serde_json::to_string(&b.trees).unwrap()
        );
    }

    #[test]
    fn degenerate_labels_rejected() {
        let x = array![[0.0], [1.0]];
        assert!(matches!(
            train_random_forest(x.view(), &[1, 1], &ForestOptions::default()),
            Err(Error::DegenerateLabels)
        ));
    }
}
