//! Soft voting, pasting, and AdaBoost on the synthetic corpus.
//!
//! Run with: `cargo run --example ensembles` (release mode recommended;
//! pasting trains one voting classifier per sample)

use parsitext::config::ExperimentConfig;
use parsitext::dataset::split_train_test;
use parsitext::eval::{accuracy, confusion, precision_recall_f1};
use parsitext::models::{LearnerSpec, TrainedModel};
use parsitext::pipeline::{preprocess_dataset, FeaturePipeline};
use parsitext::synth::generate_synthetic_corpus;

fn main() {
    // multinomial NB sits in the voting roster, so skip PCA and keep the
    // non-negative TF-IDF matrix
    let mut cfg = ExperimentConfig::default();
    cfg.features.pca_ratio = None;
    let mut ds = generate_synthetic_corpus(600, 0.1, cfg.seed).unwrap();
    split_train_test(&mut ds, 0.2, true, cfg.seed).unwrap();
    let streams = preprocess_dataset(&cfg, &ds).unwrap();
    let y = ds.labels();
    let split = ds.split.clone().unwrap();
    let take = |idx: &[usize]| {
        let s: Vec<_> = idx.iter().map(|&i| streams[i].clone()).collect();
        let l: Vec<_> = idx.iter().map(|&i| y[i]).collect();
        (s, l)
    };
    let (train_s, train_y) = take(&split.train);
    let (test_s, test_y) = take(&split.test);
    let pipe = FeaturePipeline::fit(&cfg.features, &train_s, &train_y, cfg.seed).unwrap();
    let x_train = pipe.transform(&train_s).unwrap();
    let x_test = pipe.transform(&test_s).unwrap();

    let specs = [
        ("voting", LearnerSpec::Voting { members: None }),
        (
            "pasting",
            LearnerSpec::Pasting {
                base: Some(Box::new(LearnerSpec::logistic())),
                n_estimators: 10,
                sample_size: 200,
            },
        ),
        ("adaboost", LearnerSpec::AdaBoost { n_rounds: 100 }),
    ];
    for (name, spec) in specs {
        let model = spec.train(x_train.data.view(), &train_y, cfg.seed).unwrap();
        let pred = model.predict(x_test.data.view()).unwrap();
        let c = confusion(&test_y, &pred).unwrap();
        let m = precision_recall_f1(&c);
        println!(
            "{name:9} precision {:.4} recall {:.4} f1 {:.4} accuracy {:.4}",
            m.precision,
            m.recall,
            m.f1,
            accuracy(&c)
        );
        if let TrainedModel::Ensemble(e) = &model {
            println!("          members: {}", e.members.len());
        }
    }
}
