//! Train each of the five classifiers on the synthetic corpus and compare
//! their held-out scores.
//!
//! Run with: `cargo run --example train_classifiers`

use parsitext::config::ExperimentConfig;
use parsitext::dataset::split_train_test;
use parsitext::eval::{accuracy, confusion, precision_recall_f1, roc_auc};
use parsitext::models::LearnerSpec;
use parsitext::pipeline::{preprocess_dataset, FeaturePipeline};
use parsitext::synth::generate_synthetic_corpus;

fn main() {
    // one shared feature space for all six learners; multinomial NB needs
    // non-negative input, so the comparison runs on raw TF-IDF
    let mut cfg = ExperimentConfig::default();
    cfg.features.pca_ratio = None;
    let mut ds = generate_synthetic_corpus(1000, 0.1, cfg.seed).unwrap();
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

    println!("{:16} {:>9} {:>9} {:>9} {:>9} {:>9}", "model", "precision", "recall", "f1", "accuracy", "auc");
    for (name, spec) in [
        ("svm", LearnerSpec::svm()),
        ("logistic", LearnerSpec::logistic()),
        ("random forest", LearnerSpec::RandomForest { n_trees: 100, max_depth: None }),
        ("lda", LearnerSpec::Lda { ridge: 1e-6 }),
        ("multinomial nb", LearnerSpec::Mnb { alpha: 1.0 }),
        ("gaussian nb", LearnerSpec::Gnb { var_floor: 1e-9 }),
    ] {
        let model = spec.train(x_train.data.view(), &train_y, cfg.seed).unwrap();
        let pred = model.predict(x_test.data.view()).unwrap();
        let scores = model.predict_score(x_test.data.view()).unwrap().to_vec();
        let c = confusion(&test_y, &pred).unwrap();
        let m = precision_recall_f1(&c);
        let auc = roc_auc(&test_y, &scores).unwrap().auc;
        println!(
            "{name:16} {:9.4} {:9.4} {:9.4} {:9.4} {auc:9.4}",
            m.precision,
            m.recall,
            m.f1,
            accuracy(&c)
        );
    }
}
