//! Build n-gram vocabularies and TF-IDF matrices from token streams.
//!
//! Run with: `cargo run --example tfidf_features`

use parsitext::features::{build_vocabulary, extract_ngrams, tfidf_fit_transform, NgramUnit};
use parsitext::tokenize::TokenStream;

fn main() {
    let corpus: Vec<TokenStream> = [
        vec!["فیلم", "خوب", "بود"],
        vec!["داستان", "بد", "بود"],
        vec!["فیلم", "بد", "نبود"],
    ]
    .into_iter()
    .enumerate()
    .map(|(i, toks)| {
        TokenStream::new(
            format!("d{i}"),
            toks.into_iter().map(str::to_owned).collect(),
        )
    })
    .collect();

    println!(
        "bigrams of doc 0: {:?}",
        extract_ngrams(&corpus[0], NgramUnit::Word, 2)
    );
    println!(
        "char unigrams of doc 0: {:?}",
        extract_ngrams(&corpus[0], NgramUnit::Char, 1)
    );

    let vocab = build_vocabulary(&corpus, NgramUnit::Word, 1, 1).unwrap();
    println!("vocabulary ({} features):", vocab.len());
    for (col, name) in vocab.feature_names().iter().enumerate() {
        println!(
            "  {col}: {name:8} df={} idf={:.4}",
            vocab.doc_freq(col),
            vocab.idf(col)
        );
    }

    let matrix = tfidf_fit_transform(&corpus, &vocab);
    println!("tf-idf matrix ({}x{}, rows L2-normalized):", matrix.rows(), matrix.cols());
    let mut dump = Vec::new();
    matrix.dump(&mut dump).unwrap();
    print!("{}", String::from_utf8(dump).unwrap());
}
