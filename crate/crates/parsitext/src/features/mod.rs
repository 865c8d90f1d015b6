//! Feature engineering: n-gram extraction, TF-IDF weighting, PCA reduction,
//! KMeans-derived features, and importance-based selection.

mod kmeans;
mod pca;
mod select;

pub use kmeans::{
    assign_clusters, cluster_center_features, cluster_distance_features, kmeans_fit,
    select_k_by_silhouette, silhouette_score, KMeansModel,
};
pub use pca::{pca_fit, pca_reconstruct, pca_transform, PcaModel};
pub use select::{apply_column_mask, select_features_by_importance, ImportanceThreshold};

use std::collections::HashMap;
use std::fmt;
use std::io::Write;

use ndarray::{Array1, Array2};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tokenize::TokenStream;

/// What a feature is made of.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NgramUnit {
    Word,
    Char,
}

impl fmt::Display for NgramUnit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NgramUnit::Word => write!(f, "word"),
            NgramUnit::Char => write!(f, "char"),
        }
    }
}

/// Weighting state of a [`FeatureMatrix`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NormState {
    RawCount,
    Tfidf,
    Reduced,
}

impl fmt::Display for NormState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NormState::RawCount => write!(f, "raw-count"),
            NormState::Tfidf => write!(f, "tfidf"),
            NormState::Reduced => write!(f, "reduced"),
        }
    }
}

/// Documents-by-features numeric matrix with named columns.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    pub data: Array2<f64>,
    pub norm_state: NormState,
    pub feature_names: Vec<String>,
}

impl FeatureMatrix {
    pub fn new(data: Array2<f64>, norm_state: NormState, feature_names: Vec<String>) -> Self {
        debug_assert_eq!(data.ncols(), feature_names.len());
        FeatureMatrix {
            data,
            norm_state,
            feature_names,
        }
    }

    pub fn rows(&self) -> usize {
        self.data.nrows()
    }

    pub fn cols(&self) -> usize {
        self.data.ncols()
    }

    /// Write the debug dump format: a `rows cols norm_state` header line,
    /// then one `row col value` triple per non-zero entry.
    pub fn dump<W: Write>(&self, w: &mut W) -> std::io::Result<()> {
        writeln!(w, "{} {} {}", self.rows(), self.cols(), self.norm_state)?;
        for ((r, c), v) in self.data.indexed_iter() {
            if *v != 0.0 {
                writeln!(w, "{r} {c} {v}")?;
            }
        }
        Ok(())
    }
}

/// Column-wise concatenation; every part must have the same row count.
/// Column order follows argument order.
pub fn combine_features(parts: &[&FeatureMatrix]) -> Result<FeatureMatrix> {
    let rows = match parts.first() {
        Some(p) => p.rows(),
        None => return Err(Error::EmptyCorpus),
    };
    for p in parts {
        if p.rows() != rows {
            return Err(Error::ShapeMismatch(format!(
                "combine_features: {} rows vs {} rows",
                rows,
                p.rows()
            )));
        }
    }
    let cols: usize = parts.iter().map(|p| p.cols()).sum();
    let mut data = Array2::<f64>::zeros((rows, cols));
    let mut names = Vec::with_capacity(cols);
    let mut offset = 0;
    for p in parts {
        for r in 0..rows {
            for c in 0..p.cols() {
                data[[r, offset + c]] = p.data[[r, c]];
            }
        }
        names.extend(p.feature_names.iter().cloned());
        offset += p.cols();
    }
    let state = if parts.iter().all(|p| p.norm_state == parts[0].norm_state) {
        parts[0].norm_state
    } else {
        NormState::Reduced
    };
    Ok(FeatureMatrix::new(data, state, names))
}

/// Contiguous n-grams of a document, in document order.
///
/// Word n-grams join tokens with a single space as the feature key. Char
/// n-grams are taken inside each token independently, so punctuation
/// stripping can never manufacture cross-token grams. A document shorter
/// than `n` yields an empty list.
pub fn extract_ngrams(stream: &TokenStream, unit: NgramUnit, n: usize) -> Vec<String> {
    if n == 0 {
        return Vec::new();
    }
    match unit {
        NgramUnit::Word => stream
            .tokens
            .windows(n)
            .map(|w| w.join(" "))
            .collect(),
        NgramUnit::Char => {
            let mut out = Vec::new();
            for token in &stream.tokens {
                let chars: Vec<char> = token.chars().collect();
                if chars.len() < n {
                    continue;
                }
                for w in chars.windows(n) {
                    out.push(w.iter().collect());
                }
            }
            out
        }
    }
}

/// Feature-to-column mapping with the document frequencies needed for IDF.
///
/// Built from the training split only; column ids are dense and assigned in
/// first-seen order.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(from = "VocabularyDoc", into = "VocabularyDoc")]
pub struct Vocabulary {
    #[serde(skip)]
    index: HashMap<String, usize>,
    names: Vec<String>,
    doc_freq: Vec<usize>,
    pub n_docs: usize,
    pub unit: NgramUnit,
    pub n: usize,
}

#[derive(Serialize, Deserialize)]
struct VocabularyDoc {
    names: Vec<String>,
    doc_freq: Vec<usize>,
    n_docs: usize,
    unit: NgramUnit,
    n: usize,
}

impl From<VocabularyDoc> for Vocabulary {
    fn from(d: VocabularyDoc) -> Self {
        let index = d
            .names
            .iter()
            .enumerate()
            .map(|(i, s)| (s.clone(), i))
            .collect();
        Vocabulary {
            index,
            names: d.names,
            doc_freq: d.doc_freq,
            n_docs: d.n_docs,
            unit: d.unit,
            n: d.n,
        }
    }
}

impl From<Vocabulary> for VocabularyDoc {
    fn from(v: Vocabulary) -> Self {
        VocabularyDoc {
            names: v.names,
            doc_freq: v.doc_freq,
            n_docs: v.n_docs,
            unit: v.unit,
            n: v.n,
        }
    }
}

impl Vocabulary {
    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn column(&self, feature: &str) -> Option<usize> {
        self.index.get(feature).copied()
    }

    pub fn feature_names(&self) -> &[String] {
        &self.names
    }

    pub fn doc_freq(&self, col: usize) -> usize {
        self.doc_freq[col]
    }

    /// Smoothed inverse document frequency: `ln((1+N)/(1+df)) + 1`.
    pub fn idf(&self, col: usize) -> f64 {
        ((1.0 + self.n_docs as f64) / (1.0 + self.doc_freq[col] as f64)).ln() + 1.0
    }
}

/// Build a vocabulary from the training corpus.
///
/// Features seen in fewer than `min_df` documents are dropped; the default
/// of 1 keeps everything.
pub fn build_vocabulary(
    corpus: &[TokenStream],
    unit: NgramUnit,
    n: usize,
    min_df: usize,
) -> Result<Vocabulary> {
    if corpus.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let min_df = min_df.max(1);
    let per_doc: Vec<Vec<String>> = corpus
        .iter()
        .map(|stream| extract_ngrams(stream, unit, n))
        .collect();
    let mut df: HashMap<&str, usize> = HashMap::new();
    let mut order: Vec<&str> = Vec::new();
    for doc in &per_doc {
        let mut seen_doc: HashMap<&str, ()> = HashMap::new();
        for gram in doc {
            if seen_doc.insert(gram.as_str(), ()).is_none() {
                let entry = df.entry(gram.as_str()).or_insert(0);
                if *entry == 0 {
                    order.push(gram.as_str());
                }
                *entry += 1;
            }
        }
    }
    let mut index = HashMap::new();
    let mut names = Vec::new();
    let mut doc_freq = Vec::new();
    for gram in order {
        let f = df[gram];
        if f >= min_df {
            index.insert(gram.to_owned(), names.len());
            names.push(gram.to_owned());
            doc_freq.push(f);
        }
    }
    Ok(Vocabulary {
        index,
        names,
        doc_freq,
        n_docs: corpus.len(),
        unit,
        n,
    })
}

/// Raw n-gram counts for one document; out-of-vocabulary grams are ignored.
pub fn count_row(stream: &TokenStream, vocab: &Vocabulary) -> Array1<f64> {
    let mut row = Array1::<f64>::zeros(vocab.len());
    for gram in extract_ngrams(stream, vocab.unit, vocab.n) {
        if let Some(col) = vocab.column(&gram) {
            row[col] += 1.0;
        }
    }
    row
}

/// Raw count matrix over a corpus.
pub fn count_transform(corpus: &[TokenStream], vocab: &Vocabulary) -> FeatureMatrix {
    let mut data = Array2::<f64>::zeros((corpus.len(), vocab.len()));
    for (i, stream) in corpus.iter().enumerate() {
        data.row_mut(i).assign(&count_row(stream, vocab));
    }
    FeatureMatrix::new(data, NormState::RawCount, vocab.feature_names().to_vec())
}

/// TF-IDF row for one document: `tf * idf`, then L2-normalized.
///
/// A document with no in-vocabulary terms keeps its zero row.
pub fn tfidf_transform_doc(stream: &TokenStream, vocab: &Vocabulary) -> Array1<f64> {
    let mut row = count_row(stream, vocab);
    for col in 0..vocab.len() {
        row[col] *= vocab.idf(col);
    }
    let norm = row.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm > 0.0 {
        row.mapv_inplace(|v| v / norm);
    }
    row
}

/// TF-IDF matrix over the corpus the vocabulary was fitted on.
pub fn tfidf_fit_transform(corpus: &[TokenStream], vocab: &Vocabulary) -> FeatureMatrix {
    tfidf_transform(corpus, vocab)
}

/// TF-IDF matrix over any corpus using frozen training statistics.
pub fn tfidf_transform(corpus: &[TokenStream], vocab: &Vocabulary) -> FeatureMatrix {
    let mut data = Array2::<f64>::zeros((corpus.len(), vocab.len()));
    for (i, stream) in corpus.iter().enumerate() {
        data.row_mut(i).assign(&tfidf_transform_doc(stream, vocab));
    }
    FeatureMatrix::new(data, NormState::Tfidf, vocab.feature_names().to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn stream(tokens: &[&str]) -> TokenStream {
        TokenStream::new("d", tokens.iter().map(|s| s.to_string()).collect())
    }

    #[test]
    fn word_ngrams() {
        let s = stream(&["A", "B", "C"]);
        assert_eq!(extract_ngrams(&s, NgramUnit::Word, 2), vec!["A B", "B C"]);
        assert_eq!(extract_ngrams(&s, NgramUnit::Word, 1), vec!["A", "B", "C"]);
        assert_eq!(extract_ngrams(&s, NgramUnit::Word, 4), Vec::<String>::new());
    }

    #[test]
    fn char_ngrams_stay_inside_tokens() {
        let s = stream(&["خوب"]);
        assert_eq!(extract_ngrams(&s, NgramUnit::Char, 1), vec!["خ", "و", "ب"]);
        let two = stream(&["اب", "کد"]);
        assert_eq!(extract_ngrams(&two, NgramUnit::Char, 2), vec!["اب", "کد"]);
    }

    #[test]
    fn vocabulary_first_seen_order_and_df() {
        let corpus = vec![stream(&["A", "B"]), stream(&["B"])];
        let v = build_vocabulary(&corpus, NgramUnit::Word, 1, 1).unwrap();
        assert_eq!(v.column("A"), Some(0));
        assert_eq!(v.column("B"), Some(1));
        assert_eq!(v.doc_freq(0), 1);
        assert_eq!(v.doc_freq(1), 2);

        let pruned = build_vocabulary(&corpus, NgramUnit::Word, 1, 2).unwrap();
        assert_eq!(pruned.len(), 1);
        assert_eq!(pruned.column("B"), Some(0));
    }

    #[test]
    fn empty_corpus_is_an_error() {
        assert!(matches!(
            build_vocabulary(&[], NgramUnit::Word, 1, 1),
            Err(Error::EmptyCorpus)
        ));
    }

    #[test]
    fn repeated_gram_counts_once_for_df() {
        let corpus = vec![stream(&["A", "A", "A"])];
        let v = build_vocabulary(&corpus, NgramUnit::Word, 1, 1).unwrap();
        assert_eq!(v.doc_freq(0), 1);
    }

    #[test]
    fn tfidf_matches_hand_computation() {
        // idf(A) = ln(3/2)+1, idf(B) = ln(3/3)+1 = 1
        let corpus = vec![stream(&["A", "B"]), stream(&["B"])];
        let v = build_vocabulary(&corpus, NgramUnit::Word, 1, 1).unwrap();
        let m = tfidf_fit_transform(&corpus, &v);
        let idf_a = (3.0f64 / 2.0).ln() + 1.0;
        let norm = (idf_a * idf_a + 1.0).sqrt();
        assert!((m.data[[0, 0]] - idf_a / norm).abs() < 1e-12);
        assert!((m.data[[0, 1]] - 1.0 / norm).abs() < 1e-12);
        assert!((m.data[[0, 0]] - 0.8148).abs() < 5e-5);
        assert!((m.data[[0, 1]] - 0.5797).abs() < 5e-5);
        // single-term doc has unit weight regardless of idf
        assert!((m.data[[1, 1]] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn out_of_vocabulary_doc_is_a_zero_row() {
        let corpus = vec![stream(&["A"])];
        let v = build_vocabulary(&corpus, NgramUnit::Word, 1, 1).unwrap();
        let row = tfidf_transform_doc(&stream(&["Z", "Q"]), &v);
        assert!(row.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn combine_concatenates_columns_in_order() {
        let a = FeatureMatrix::new(
            Array2::from_shape_vec((2, 2), vec![1.0, 2.0, 3.0, 4.0]).unwrap(),
            NormState::Tfidf,
            vec!["a0".into(), "a1".into()],
        );
        let b = FeatureMatrix::new(
            Array2::from_shape_vec((2, 3), vec![5.0, 6.0, 7.0, 8.0, 9.0, 10.0]).unwrap(),
            NormState::Tfidf,
            vec!["b0".into(), "b1".into(), "b2".into()],
        );
        let c = combine_features(&[&a, &b]).unwrap();
        assert_eq!(c.cols(), 5);
        assert_eq!(c.data[[0, 0]], 1.0);
        assert_eq!(c.data[[0, 2]], 5.0);
        assert_eq!(c.feature_names[4], "b2");

        let bad = FeatureMatrix::new(
            Array2::zeros((3, 1)),
            NormState::Tfidf,
            vec!["x".into()],
        );
        assert!(combine_features(&[&a, &bad]).is_err());
    }

    #[test]
    fn combine_is_associative_in_layout() {
        let m = |v: Vec<f64>, c: usize, tag: &str| {
            FeatureMatrix::new(
                Array2::from_shape_vec((2, c), v).unwrap(),
                NormState::Tfidf,
                (0..c).map(|i| format!("{tag}{i}")).collect(),
            )
        };
        let a = m(vec![1.0, 2.0], 1, "a");
        let b = m(vec![3.0, 4.0], 1, "b");
        let c = m(vec![5.0, 6.0], 1, "c");
        let ab_c = combine_features(&[&combine_features(&[&a, &b]).unwrap(), &c]).unwrap();
        let abc = combine_features(&[&a, &b, &c]).unwrap();
        assert_eq!(ab_c.data, abc.data);
        assert_eq!(ab_c.feature_names, abc.feature_names);
    }

    #[test]
    fn dump_format() {
        let m = FeatureMatrix::new(
            Array2::from_shape_vec((2, 2), vec![1.5, 0.0, 0.0, 2.0]).unwrap(),
            NormState::RawCount,
            vec!["x".into(), "y".into()],
        );
        let mut buf = Vec::new();
        m.dump(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text, "2 2 raw-count\n0 0 1.5\n1 1 2\n");
    }

    proptest! {
        #[test]
        fn tfidf_rows_have_unit_or_zero_norm(
            docs in proptest::collection::vec(
                proptest::collection::vec("[a-e]", 0..8), 1..10)
        ) {
            let corpus: Vec<TokenStream> = docs
                .iter()
                .map(|toks| TokenStream::new("d", toks.clone()))
                .collect();
            let v = build_vocabulary(&corpus, NgramUnit::Word, 1, 1).unwrap();
            let m = tfidf_fit_transform(&corpus, &v);
            for r in 0..m.rows() {
                let norm: f64 = m.data.row(r).iter().map(|x| x * x).sum::<f64>().sqrt();
                prop_assert!(norm.abs() < 1e-9 || (norm - 1.0).abs() < 1e-9);
            }
        }

        #[test]
        fn no_negative_weights_before_pca(
            docs in proptest::collection::vec(
                proptest::collection::vec("[a-c]", 0..6), 1..6)
        ) {
            let corpus: Vec<TokenStream> = docs
                .iter()
                .map(|toks| TokenStream::new("d", toks.clone()))
                .collect();
            let v = build_vocabulary(&corpus, NgramUnit::Word, 1, 1).unwrap();
            prop_assert!(count_transform(&corpus, &v).data.iter().all(|&x| x >= 0.0));
            prop_assert!(tfidf_fit_transform(&corpus, &v).data.iter().all(|&x| x >= 0.0));
        }
    }
}
