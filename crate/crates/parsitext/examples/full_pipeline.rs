//! The whole experiment in one call: synthetic corpus in, artifact
//! directory out.
//!
//! Run with: `cargo run --release --example full_pipeline`

use parsitext::config::ExperimentConfig;
use parsitext::pipeline::{run_experiment, write_artifacts};
use parsitext::synth::generate_synthetic_corpus;

fn main() {
    let mut cfg = ExperimentConfig::default();
    cfg.eval.cv_folds = Some(5);
    cfg.eval.tune_recall = Some(0.91);

    let mut ds = generate_synthetic_corpus(2000, 0.1, cfg.seed).unwrap();
    let output = run_experiment(&cfg, &mut ds).unwrap();
    let r = &output.report;

    println!("model: {}", r.model_kind);
    println!(
        "features: {} {}-gram, vocab {}, pca {} dims ({:.4} retained)",
        r.features.unit,
        r.features.n,
        r.features.vocab_size,
        r.features.pca_components.unwrap_or(0),
        r.features.pca_retained_ratio.unwrap_or(0.0)
    );
    for (name, m) in [("train", &r.train), ("test", &r.test)] {
        println!(
            "{name:5} precision {:.4} recall {:.4} f1 {:.4} accuracy {:.4} auc {}",
            m.precision,
            m.recall,
            m.f1,
            m.accuracy,
            m.auc.map_or_else(|| "n/a".into(), |a| format!("{a:.4}")),
        );
    }
    if let Some(cv) = &r.cv {
        println!("cv ({} folds): f1 {:.4} +/- {:.4}", cv.k, cv.f1.mean, cv.f1.std);
    }
    if let Some(t) = &r.threshold {
        println!(
            "threshold for recall >= {:.2}: {:.4} (precision {:.4}, recall {:.4})",
            t.target_recall, t.choice.threshold, t.choice.precision, t.choice.recall
        );
    }

    let out = std::env::temp_dir().join("parsitext-full-pipeline");
    write_artifacts(&out, &cfg, &output, true).unwrap();
    println!("artifacts -> {}", out.display());
}
