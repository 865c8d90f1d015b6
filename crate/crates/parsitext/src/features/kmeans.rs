//! Lloyd's KMeans with k-means++ initialization, plus the cluster-derived
//! feature constructions (distances to centers, assigned-center rows).

use ndarray::{Array2, ArrayView1};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::{FeatureMatrix, NormState};

const SHIFT_TOL: f64 = 1e-6;
const MAX_ITER: usize = 300;

/// Fitted cluster centers.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KMeansModel {
    pub k: usize,
    /// `k x d`.
    pub centers: Array2<f64>,
    /// Sum of squared distances of points to their assigned center.
    pub inertia: f64,
    /// Inertia after each assignment step; non-increasing.
    pub inertia_history: Vec<f64>,
    pub n_iter: usize,
}

fn sq_dist(a: ArrayView1<f64>, b: ArrayView1<f64>) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y) * (x - y))
        .sum()
}

/// Index of the nearest center; ties resolve to the lowest index.
fn nearest(centers: &Array2<f64>, point: ArrayView1<f64>) -> (usize, f64) {
    let mut best = 0;
    let mut best_d = f64::INFINITY;
    for (j, c) in centers.rows().into_iter().enumerate() {
        let d = sq_dist(point, c);
        if d < best_d {
            best_d = d;
            best = j;
        }
    }
    (best, best_d)
}

/// Run Lloyd's algorithm until the largest center shift drops below 1e-6 or
/// 300 iterations pass. Deterministic for a given seed.
pub fn kmeans_fit(x: &Array2<f64>, k: usize, seed: u64) -> Result<KMeansModel> {
    let n = x.nrows();
    if k == 0 || k > n {
        return Err(Error::InvalidK(format!("k = {k} with {n} rows")));
    }
    let d = x.ncols();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    // k-means++ seeding
    let mut centers = Array2::<f64>::zeros((k, d));
    let first = rng.gen_range(0..n);
    centers.row_mut(0).assign(&x.row(first));
    let mut dist2: Vec<f64> = (0..n)
        .map(|i| sq_dist(x.row(i), centers.row(0)))
        .collect();
    for j in 1..k {
        let total: f64 = dist2.iter().sum();
        let pick = if total > 0.0 {
            let r = rng.gen::<f64>() * total;
            let mut acc = 0.0;
            let mut chosen = n - 1;
            for (i, &d2) in dist2.iter().enumerate() {
                acc += d2;
                if acc >= r {
                    chosen = i;
                    break;
                }
            }
            chosen
        } else {
            rng.gen_range(0..n)
        };
        centers.row_mut(j).assign(&x.row(pick));
        for (i, d) in dist2.iter_mut().enumerate() {
            let d2 = sq_dist(x.row(i), centers.row(j));
            if d2 < *d {
                *d = d2;
            }
        }
    }

    let mut assignments = vec![0usize; n];
    let mut inertia_history = Vec::new();
    let mut inertia = 0.0;
    let mut n_iter = 0;
    for iter in 0..MAX_ITER {
        n_iter = iter + 1;
        inertia = 0.0;
        for (i, slot) in assignments.iter_mut().enumerate() {
            let (j, d2) = nearest(&centers, x.row(i));
            *slot = j;
            inertia += d2;
        }
        inertia_history.push(inertia);

        let mut sums = Array2::<f64>::zeros((k, d));
        let mut counts = vec![0usize; k];
        for i in 0..n {
            let j = assignments[i];
            counts[j] += 1;
            for c in 0..d {
                sums[[j, c]] += x[[i, c]];
            }
        }
        let mut shift: f64 = 0.0;
        for j in 0..k {
            if counts[j] == 0 {
                continue; // empty cluster keeps its previous center
            }
            let mut moved = 0.0;
            for c in 0..d {
                let new = sums[[j, c]] / counts[j] as f64;
                let delta = new - centers[[j, c]];
                moved += delta * delta;
                centers[[j, c]] = new;
            }
            shift = shift.max(moved.sqrt());
        }
        if shift < SHIFT_TOL {
            // record the inertia under the final centers
            inertia = (0..n).map(|i| nearest(&centers, x.row(i)).1).sum();
            inertia_history.push(inertia);
            break;
        }
    }

    Ok(KMeansModel {
        k,
        centers,
        inertia,
        inertia_history,
        n_iter,
    })
}

/// Nearest-center index for every row.
pub fn assign_clusters(x: &Array2<f64>, model: &KMeansModel) -> Vec<usize> {
    (0..x.nrows())
        .map(|i| nearest(&model.centers, x.row(i)).0)
        .collect()
}

/// Replace each row with its Euclidean distances to the k centers.
pub fn cluster_distance_features(
    x: &FeatureMatrix,
    model: &KMeansModel,
) -> Result<FeatureMatrix> {
    check_dims(x, model)?;
    let n = x.rows();
    let mut data = Array2::<f64>::zeros((n, model.k));
    for i in 0..n {
        for j in 0..model.k {
            data[[i, j]] = sq_dist(x.data.row(i), model.centers.row(j)).sqrt();
        }
    }
    let names = (0..model.k).map(|j| format!("dist_c{j}")).collect();
    Ok(FeatureMatrix::new(data, NormState::Reduced, names))
}

/// Replace each row with the center it is assigned to.
pub fn cluster_center_features(x: &FeatureMatrix, model: &KMeansModel) -> Result<FeatureMatrix> {
    check_dims(x, model)?;
    let n = x.rows();
    let d = model.centers.ncols();
    let assignments = assign_clusters(&x.data, model);
    let mut data = Array2::<f64>::zeros((n, d));
    for (i, &cluster) in assignments.iter().enumerate() {
        data.row_mut(i).assign(&model.centers.row(cluster));
    }
    let names = (0..d).map(|j| format!("center_d{j}")).collect();
    Ok(FeatureMatrix::new(data, NormState::Reduced, names))
}

fn check_dims(x: &FeatureMatrix, model: &KMeansModel) -> Result<()> {
    if x.cols() != model.centers.ncols() {
        return Err(Error::ShapeMismatch(format!(
            "{} columns vs centers with {}",
            x.cols(),
            model.centers.ncols()
        )));
    }
    Ok(())
}

/// Mean silhouette coefficient of a clustering; in [-1, 1], higher is
/// tighter. Points in singleton clusters contribute 0.
pub fn silhouette_score(x: &Array2<f64>, assignments: &[usize], k: usize) -> f64 {
    let n = x.nrows();
    if n == 0 || k < 2 {
        return 0.0;
    }
    let counts = {
        let mut c = vec![0usize; k];
        for &a in assignments {
            c[a] += 1;
        }
        c
    };
    let mut total = 0.0;
    for i in 0..n {
        let own = assignments[i];
        if counts[own] <= 1 {
            continue;
        }
        let mut sums = vec![0.0f64; k];
        for j in 0..n {
            if i == j {
                continue;
            }
            sums[assignments[j]] += sq_dist(x.row(i), x.row(j)).sqrt();
        }
        let a = sums[own] / (counts[own] - 1) as f64;
        let b = (0..k)
            .filter(|&c| c != own && counts[c] > 0)
            .map(|c| sums[c] / counts[c] as f64)
            .fold(f64::INFINITY, f64::min);
        if b.is_finite() {
            total += (b - a) / a.max(b).max(f64::MIN_POSITIVE);
        }
    }
    total / n as f64
}

/// Pick the k in `k_range` with the highest silhouette score. This stands in
/// for a mixture-model scan when the cluster count is not known up front.
pub fn select_k_by_silhouette(
    x: &Array2<f64>,
    k_range: std::ops::RangeInclusive<usize>,
    seed: u64,
) -> Result<usize> {
    let mut best_k = None;
    let mut best_score = f64::NEG_INFINITY;
    for k in k_range {
        let model = kmeans_fit(x, k, seed)?;
        let score = silhouette_score(x, &assign_clusters(x, &model), k);
        if score > best_score {
            best_score = score;
            best_k = Some(k);
        }
    }
    best_k.ok_or_else(|| Error::InvalidK("empty k range".into()))
}
