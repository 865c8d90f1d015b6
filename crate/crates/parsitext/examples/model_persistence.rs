//! Save a trained model to versioned JSON and load it back.
//!
//! Run with: `cargo run --example model_persistence`

use parsitext::config::ExperimentConfig;
use parsitext::models::{load_model, save_model, LearnerSpec};
use parsitext::pipeline::{preprocess_dataset, FeaturePipeline};
use parsitext::synth::generate_synthetic_corpus;

fn main() {
    let cfg = ExperimentConfig::default();
    let ds = generate_synthetic_corpus(200, 0.0, cfg.seed).unwrap();
    let streams = preprocess_dataset(&cfg, &ds).unwrap();
    let y = ds.labels();
    let pipe = FeaturePipeline::fit(&cfg.features, &streams, &y, cfg.seed).unwrap();
    let x = pipe.transform(&streams).unwrap();

    let model = LearnerSpec::svm().train(x.data.view(), &y, cfg.seed).unwrap();
    let path = std::env::temp_dir().join("parsitext-model.json");
    save_model(&model, &path).unwrap();
    println!("saved {} to {}", model.kind_name(), path.display());

    let loaded = load_model(&path).unwrap();
    let same = model.predict(x.data.view()).unwrap() == loaded.predict(x.data.view()).unwrap();
    println!("loaded model predictions identical: {same}");
}
