//! # parsitext
//!
//! A Persian text-classification toolkit. The pipeline runs from raw
//! user-generated text to evaluated classifiers:
//!
//! - [`text_norm`]: Unicode canonicalization for Persian — Arabic variant
//!   unification, harakat/TATWEEL stripping, ZWNJ-canonical affix joining,
//!   and a best-effort FEnglish transliterator.
//! - [`tokenize`]: whitespace/punctuation tokenization (ZWNJ is
//!   intra-word), stopword filtering, and a light suffix-stripping stemmer.
//! - [`features`]: word/char n-grams, TF-IDF, PCA by retained variance,
//!   KMeans-derived feature sets, and forest-importance selection.
//! - [`models`]: SGD linear SVM and logistic regression, multinomial and
//!   Gaussian naive Bayes, random forest, Fisher LDA, decision stumps, all
//!   with a uniform score/proba/predict contract and JSON persistence.
//! - [`ensemble`]: soft voting, pasting, and AdaBoost over stumps.
//! - [`eval`]: confusion metrics, ROC/AUC, stratified cross-validation,
//!   learning curves, and decision-threshold tuning.
//! - [`pipeline`]: experiment orchestration with strict train-only fitting,
//!   plus dataset ingestion ([`dataset`]) and a deterministic synthetic
//!   corpus generator ([`synth`]).
//!
//! The `parsitext` binary exposes each stage as a subcommand; the crate's
//! `examples/` directory has one runnable example per capability.

pub mod charts;
pub mod config;
pub mod dataset;
pub mod ensemble;
pub mod error;
pub mod eval;
pub mod features;
mod linalg;
pub mod models;
pub mod pipeline;
pub mod synth;
pub mod text_norm;
pub mod tokenize;

pub use error::{Error, Result};

#[cfg(test)]
pub(crate) mod test_fixtures {
    use ndarray::Array2;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Two separable blobs around (-2,-2) and (2,2), alternating labels.
    pub fn blobs(n_per: usize, seed: u64) -> (Array2<f64>, Vec<usize>) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = n_per * 2;
        let mut x = Array2::<f64>::zeros((n, 2));
        let mut y = Vec::with_capacity(n);
        for i in 0..n {
            let label = i % 2;
            let c = if label == 1 { 2.0 } else { -2.0 };
            x[[i, 0]] = c + rng.gen_range(-0.5..0.5);
            x[[i, 1]] = c + rng.gen_range(-0.5..0.5);
            y.push(label);
        }
        (x, y)
    }

    /// The blob fixture embedded into non-negative counts whose per-class
    /// feature proportions carry the class signal, as multinomial NB needs:
    /// each coordinate v becomes the pair (4 + v, 4 - v).
    pub fn count_blobs(n_per: usize, seed: u64) -> (Array2<f64>, Vec<usize>) {
        let (x, y) = blobs(n_per, seed);
        let n = x.nrows();
        let mut counts = Array2::<f64>::zeros((n, 4));
        for i in 0..n {
            counts[[i, 0]] = 4.0 + x[[i, 0]];
            counts[[i, 1]] = 4.0 - x[[i, 0]];
            counts[[i, 2]] = 4.0 + x[[i, 1]];
            counts[[i, 3]] = 4.0 - x[[i, 1]];
        }
        (counts, y)
    }
}
