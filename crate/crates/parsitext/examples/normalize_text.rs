//! Canonicalize messy Persian input: Arabic code-point variants, TATWEEL
//! padding, harakat, and the three surface forms of a suffixed word.
//!
//! Run with: `cargo run --example normalize_text`

use parsitext::text_norm::{normalize, transliterate_fenglish, NormalizationTable,
    TransliterationTable};

fn main() {
    let table = NormalizationTable::shipped();

    let samples = [
        "بخش ها",        // space-joined plural
        "بخش\u{200C}ها", // ZWNJ-joined plural (canonical)
        "بخشها",         // fused plural
        "كتاب علي",      // Arabic kaf and yeh
        "بـــد",          // TATWEEL stretching
        "مَدرَسه",         // harakat
        "۱۲۳ و ١٢٣",     // Persian and Arabic-Indic digits
    ];
    for raw in samples {
        let out = normalize(raw, table);
        println!("{raw:24} -> {:24} rules: {:?}", out.text, out.applied_rules);
    }

    let translit = TransliterationTable::shipped();
    for latin in ["salam", "khob", "chetori"] {
        let out = transliterate_fenglish(latin, translit, table);
        println!("fenglish {latin:10} -> {}", out.text);
    }
}
