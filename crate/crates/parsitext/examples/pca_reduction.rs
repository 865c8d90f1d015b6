//! Reduce TF-IDF features with PCA, keeping 99% of the variance.
//!
//! Run with: `cargo run --example pca_reduction`

use parsitext::config::ExperimentConfig;
use parsitext::features::{pca_fit, pca_transform, tfidf_fit_transform, build_vocabulary};
use parsitext::pipeline::preprocess_dataset;
use parsitext::synth::generate_synthetic_corpus;

fn main() {
    let cfg = ExperimentConfig::default();
    let ds = generate_synthetic_corpus(300, 0.0, cfg.seed).unwrap();
    let streams = preprocess_dataset(&cfg, &ds).unwrap();

    let vocab = build_vocabulary(&streams, cfg.features.unit, cfg.features.n, 1).unwrap();
    let tfidf = tfidf_fit_transform(&streams, &vocab);
    println!("tf-idf matrix: {} x {}", tfidf.rows(), tfidf.cols());

    let model = pca_fit(&tfidf, 0.99).unwrap();
    println!(
        "pca kept {} of {} dimensions, retaining {:.4} of the variance",
        model.n_components(),
        tfidf.cols(),
        model.retained_ratio()
    );
    println!(
        "top component ratios: {:?}",
        &model.explained_variance_ratio[..model.n_components().min(5)]
    );

    let reduced = pca_transform(&tfidf, &model).unwrap();
    println!("reduced matrix: {} x {}", reduced.rows(), reduced.cols());
}
