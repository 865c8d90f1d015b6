//! Trade precision for recall by moving the decision threshold.
//!
//! Run with: `cargo run --example threshold_tuning`

use parsitext::config::ExperimentConfig;
use parsitext::dataset::split_train_test;
use parsitext::eval::{tune_threshold, ThresholdTarget};
use parsitext::models::LearnerSpec;
use parsitext::pipeline::{preprocess_dataset, FeaturePipeline};
use parsitext::synth::generate_synthetic_corpus;

fn main() {
    // the voting roster includes multinomial NB, which needs non-negative
    // features; keep the TF-IDF matrix instead of PCA scores
    let mut cfg = ExperimentConfig::default();
    cfg.features.pca_ratio = None;
    let mut ds = generate_synthetic_corpus(800, 0.1, cfg.seed).unwrap();
    split_train_test(&mut ds, 0.25, true, cfg.seed).unwrap();
    let streams = preprocess_dataset(&cfg, &ds).unwrap();
    let y = ds.labels();
    let split = ds.split.clone().unwrap();
    let take = |idx: &[usize]| {
        let s: Vec<_> = idx.iter().map(|&i| streams[i].clone()).collect();
        let l: Vec<_> = idx.iter().map(|&i| y[i]).collect();
        (s, l)
    };
    let (train_s, train_y) = take(&split.train);
    let (val_s, val_y) = take(&split.test);
    let pipe = FeaturePipeline::fit(&cfg.features, &train_s, &train_y, cfg.seed).unwrap();
    let x_train = pipe.transform(&train_s).unwrap();
    let x_val = pipe.transform(&val_s).unwrap();
    let model = LearnerSpec::Voting { members: None }
        .train(x_train.data.view(), &train_y, cfg.seed)
        .unwrap();

    for target in [0.85, 0.91, 0.95, 0.99] {
        match tune_threshold(
            &model,
            x_val.data.view(),
            &val_y,
            ThresholdTarget::Recall(target),
        ) {
            Ok(choice) => println!(
                "recall >= {target:.2}: threshold {:.4} gives precision {:.4}, recall {:.4}",
                choice.threshold, choice.precision, choice.recall
            ),
            Err(e) => println!("recall >= {target:.2}: {e}"),
        }
    }
}
