//! Deterministic synthetic Persian review corpus.
//!
//! The real corpus behind the surrogate experiments is a collection of
//! short Persian reviews; this generator produces one with a known
//! structure: documents of one class draw sentiment words only from that
//! class's lexicon, so with zero label noise the corpus is linearly
//! separable in word-unigram space by construction. A slice of the
//! documents deliberately uses Arabic code-point variants and the three
//! plural surface forms, so an end-to-end run exercises normalization.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

use crate::dataset::{Dataset, Document, Provenance};
use crate::error::{Error, Result};
use crate::text_norm::ZWNJ;

/// Positive sentiment lexicon (canonical Persian, 32 words).
pub const POSITIVE_WORDS: &[&str] = &[
    "خوب",
    "عالی",
    "زیبا",
    "شاد",
    "شیرین",
    "دلپذیر",
    "جذاب",
    "هوشمندانه",
    "قوی",
    "درخشان",
    "لذت\u{200C}بخش",
    "سرگرم\u{200C}کننده",
    "تحسین\u{200C}برانگیز",
    "شگفت\u{200C}انگیز",
    "موفق",
    "محبوب",
    "مفید",
    "ارزشمند",
    "فاخر",
    "ممتاز",
    "شاهکار",
    "بی\u{200C}نظیر",
    "خلاقانه",
    "گیرا",
    "روان",
    "دقیق",
    "ماهرانه",
    "باشکوه",
    "پرانرژی",
    "امیدوارکننده",
    "دوستانه",
    "عاشقانه",
];

/// Negative sentiment lexicon (canonical Persian, 32 words).
pub const NEGATIVE_WORDS: &[&str] = &[
    "بد",
    "ضعیف",
    "زشت",
    "خسته\u{200C}کننده",
    "افتضاح",
    "ناامیدکننده",
    "آزاردهنده",
    "مزخرف",
    "بیهوده",
    "سطحی",
    "کسل\u{200C}کننده",
    "تلخ",
    "دردناک",
    "ناموفق",
    "مبتذل",
    "ناقص",
    "آشفته",
    "گنگ",
    "نامفهوم",
    "تکراری",
    "ملال\u{200C}آور",
    "غم\u{200C}انگیز",
    "وحشتناک",
    "اشتباه",
    "ناعادلانه",
    "خشن",
    "بی\u{200C}معنی",
    "کند",
    "شلوغ",
    "منفی",
    "سرد",
    "خالی",
];

/// Shared topic nouns both classes sample from.
pub const FILLER_WORDS: &[&str] = &[
    "فیلم",
    "داستان",
    "بازیگر",
    "کارگردان",
    "صحنه",
    "موسیقی",
    "تصویر",
    "شخصیت",
    "روایت",
    "پایان",
    "شروع",
    "دیالوگ",
    "فضا",
    "حس",
    "لحظه",
    "نقش",
    "اثر",
    "هنر",
    "سینما",
    "تماشاگر",
    "منتقد",
    "نقد",
    "ساخت",
    "متن",
    "بخش",
    "فصل",
    "قصه",
    "بازی",
    "نما",
    "صدا",
];

/// Swap canonical Persian letters for their common Arabic variants, the
/// mix-up normalization exists to undo.
fn arabicize(word: &str) -> String {
    word.chars()
        .map(|c| match c {
            '\u{06CC}' => '\u{064A}', // FARSI YEH -> ARABIC YEH
            '\u{06A9}' => '\u{0643}', // KEHEH -> ARABIC KAF
            _ => c,
        })
        .collect()
}

/// Generate a balanced corpus of `n_docs` documents.
///
/// `noise` flips the labels of `round(n_docs * noise)` randomly chosen
/// documents (text untouched). Fully deterministic for a given seed.
pub fn generate_synthetic_corpus(n_docs: usize, noise: f64, seed: u64) -> Result<Dataset> {
    if n_docs < 20 {
        return Err(Error::InvalidConfig(format!(
            "synthetic corpus needs at least 20 documents, got {n_docs}"
        )));
    }
    if !(0.0..1.0).contains(&noise) {
        return Err(Error::InvalidFraction(noise));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut documents = Vec::with_capacity(n_docs);
    for i in 0..n_docs {
        let label = i % 2;
        let lexicon = if label == 1 {
            POSITIVE_WORDS
        } else {
            NEGATIVE_WORDS
        };
        let n_sentiment = rng.gen_range(2..=4);
        let n_filler = rng.gen_range(2..=4);
        let mut sentiment: Vec<String> = lexicon
            .choose_multiple(&mut rng, n_sentiment)
            .map(|w| w.to_string())
            .collect();
        let mut filler: Vec<String> = FILLER_WORDS
            .choose_multiple(&mut rng, n_filler)
            .map(|w| w.to_string())
            .collect();

        // a slice of documents uses the messy real-world spellings
        if rng.gen_bool(0.15) {
            if let Some(w) = sentiment.first_mut() {
                *w = arabicize(w);
            }
        }
        if rng.gen_bool(0.2) {
            if let Some(w) = filler.first_mut() {
                let plural = match rng.gen_range(0..3) {
                    0 => format!("{w} ها"),
                    1 => format!("{w}{ZWNJ}ها"),
                    _ => format!("{w}ها"),
                };
                *w = plural;
            }
        }

        let text = match rng.gen_range(0..3) {
            0 => format!(
                "این {} {} و {} بود",
                filler.join(" و "),
                sentiment[0],
                sentiment[1..].join(" و "),
            ),
            1 => format!(
                "{} با {} خیلی {} است",
                filler[0],
                filler[1..].join(" و "),
                sentiment.join(" و "),
            ),
            _ => format!("{} {} بود", filler.join(" "), sentiment.join(" ")),
        };
        documents.push(Document {
            doc_id: format!("synth-{i:05}"),
            text,
            label,
        });
    }

    // exact-count label noise
    let n_flip = (n_docs as f64 * noise).round() as usize;
    if n_flip > 0 {
        let mut order: Vec<usize> = (0..n_docs).collect();
        order.shuffle(&mut rng);
        for &i in order.iter().take(n_flip) {
            documents[i].label = 1 - documents[i].label;
        }
    }

    let mut hasher = Sha256::new();
    for d in &documents {
        hasher.update(d.text.as_bytes());
        hasher.update([d.label as u8]);
    }
    Ok(Dataset {
        documents,
        provenance: Provenance {
            source: format!("synthetic(n={n_docs},noise={noise},seed={seed})"),
            sha256: hex::encode(hasher.finalize()),
        },
        split: None,
    })
}
