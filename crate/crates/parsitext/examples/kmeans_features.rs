//! Fit KMeans on reduced features and derive the three cluster feature
//! sets: distances, assigned centers, and the combination.
//!
//! Run with: `cargo run --example kmeans_features`

use parsitext::config::ExperimentConfig;
use parsitext::features::{
    assign_clusters, build_vocabulary, cluster_center_features, cluster_distance_features,
    combine_features, kmeans_fit, pca_fit, pca_transform, select_k_by_silhouette,
    silhouette_score, tfidf_fit_transform,
};
use parsitext::pipeline::preprocess_dataset;
use parsitext::synth::generate_synthetic_corpus;

fn main() {
    let cfg = ExperimentConfig::default();
    let ds = generate_synthetic_corpus(200, 0.0, cfg.seed).unwrap();
    let streams = preprocess_dataset(&cfg, &ds).unwrap();
    let vocab = build_vocabulary(&streams, cfg.features.unit, cfg.features.n, 1).unwrap();
    let tfidf = tfidf_fit_transform(&streams, &vocab);
    let pca = pca_fit(&tfidf, 0.99).unwrap();
    let reduced = pca_transform(&tfidf, &pca).unwrap();

    let k = 5;
    let model = kmeans_fit(&reduced.data, k, cfg.seed).unwrap();
    println!(
        "kmeans k={k}: converged in {} iterations, inertia {:.4}",
        model.n_iter, model.inertia
    );
    let assignments = assign_clusters(&reduced.data, &model);
    println!(
        "silhouette: {:.4}",
        silhouette_score(&reduced.data, &assignments, k)
    );

    let distances = cluster_distance_features(&reduced, &model).unwrap();
    let centers = cluster_center_features(&reduced, &model).unwrap();
    let combined = combine_features(&[&distances, &centers, &reduced]).unwrap();
    println!(
        "distances {}x{}, centers {}x{}, combined {}x{}",
        distances.rows(),
        distances.cols(),
        centers.rows(),
        centers.cols(),
        combined.rows(),
        combined.cols()
    );

    // a silhouette scan stands in for mixture-model cluster-count selection
    let best = select_k_by_silhouette(&reduced.data, 2..=6, cfg.seed).unwrap();
    println!("silhouette scan over 2..=6 picks k={best}");
}
