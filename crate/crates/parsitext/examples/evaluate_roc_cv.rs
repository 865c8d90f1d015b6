//! Metrics, ROC curves, and stratified cross-validation.
//!
//! Run with: `cargo run --example evaluate_roc_cv`

use parsitext::config::ExperimentConfig;
use parsitext::eval::{confusion, precision_recall_f1, roc_auc, roc_to_csv};
use parsitext::pipeline::cross_validate_experiment;
use parsitext::synth::generate_synthetic_corpus;

fn main() {
    // hand confusion example
    let y_true = vec![1, 1, 1, 1, 0, 0, 0, 0];
    let y_pred = vec![1, 1, 0, 1, 0, 0, 1, 0];
    let c = confusion(&y_true, &y_pred).unwrap();
    let m = precision_recall_f1(&c);
    println!(
        "tp={} fp={} tn={} fn={} -> precision {:.3} recall {:.3} f1 {:.3}",
        c.true_pos, c.false_pos, c.true_neg, c.false_neg, m.precision, m.recall, m.f1
    );

    // small ROC from raw scores
    let labels = vec![1, 0, 1, 0, 1, 0];
    let scores = vec![0.9, 0.6, 0.8, 0.3, 0.55, 0.2];
    let curve = roc_auc(&labels, &scores).unwrap();
    println!("auc = {:.4}; points:", curve.auc);
    print!("{}", roc_to_csv(&curve));

    // 5-fold CV of the default SVM pipeline on a noisy corpus
    let mut cfg = ExperimentConfig::default();
    cfg.eval.learning_curve_fractions.clear();
    let ds = generate_synthetic_corpus(400, 0.1, cfg.seed).unwrap();
    let cv = cross_validate_experiment(&cfg, &ds, 5).unwrap();
    println!(
        "5-fold cv: f1 {:.4} +/- {:.4}, accuracy {:.4} +/- {:.4}",
        cv.f1.mean, cv.f1.std, cv.accuracy.mean, cv.accuracy.std
    );
    for (i, fold) in cv.per_fold.iter().enumerate() {
        println!(
            "  fold {i}: precision {:.4} recall {:.4} f1 {:.4}",
            fold.precision, fold.recall, fold.f1
        );
    }
}
