//! Tokenize normalized text, drop stopwords, and stem suffixes.
//!
//! Run with: `cargo run --example tokenize_stem`

use parsitext::text_norm::{normalize, NormalizationTable};
use parsitext::tokenize::{remove_stopwords, shipped_stopwords, stem, stem_stream, tokenize,
    StemmerRules};

fn main() {
    let table = NormalizationTable::shipped();
    let raw = "این بخشها و فصل‌های کتاب، خیلی خوب هستند!";
    let norm = normalize(raw, table);
    println!("normalized: {}", norm.text);

    let stream = tokenize(&norm.text, "doc-0");
    println!("tokens:     {:?}", stream.tokens);

    let filtered = remove_stopwords(&stream, shipped_stopwords());
    println!("no stop:    {:?}", filtered.tokens);

    let rules = StemmerRules::shipped();
    let stemmed = stem_stream(&filtered, rules);
    println!("stemmed:    {:?}", stemmed.tokens);

    // the over-stemming guard: no rule may strip a bare final meem
    for w in ["ارام", "بخش‌هایی", "خوب‌تر", "بهترین"] {
        println!("stem({w}) = {}", stem(w, rules));
    }
}
