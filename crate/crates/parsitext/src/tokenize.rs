//! Tokenization, stopword removal, and light suffix-stripping stemming.
//!
//! Tokens are split at whitespace and punctuation only. ZWNJ is intra-word:
//! a ZWNJ-joined plural like `بخش‌ها` stays one token, so the canonical
//! affixed form counts as a single feature.

use std::collections::HashSet;
use std::path::Path;
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::text_norm::ZWNJ;

const DEFAULT_STOPWORDS: &str = include_str!("data/stopwords.txt");
const DEFAULT_STEM_RULES: &str = include_str!("data/stem_rules.tsv");

/// Ordered list of tokens for one document.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenStream {
    pub doc_id: String,
    pub tokens: Vec<String>,
}

impl TokenStream {
    pub fn new(doc_id: impl Into<String>, tokens: Vec<String>) -> Self {
        TokenStream {
            doc_id: doc_id.into(),
            tokens,
        }
    }
}

/// Punctuation for token boundaries: ASCII punctuation, Persian/Arabic
/// punctuation, and the general-punctuation block (ZWNJ excluded).
pub fn is_punctuation(c: char) -> bool {
    c.is_ascii_punctuation()
        || matches!(
            c,
            '\u{00AB}' | '\u{00BB}' // « »
            | '\u{060C}' | '\u{060D}' | '\u{061B}' | '\u{061F}' // ، ؍ ؛ ؟
            | '\u{066A}' | '\u{066B}' | '\u{066C}' | '\u{06D4}' // ٪ ٫ ٬ ۔
        )
        || ('\u{2010}'..='\u{2027}').contains(&c)
        || ('\u{2030}'..='\u{205E}').contains(&c)
}

/// Split normalized text into tokens.
///
/// The input is expected to be normalized already; only U+0020 separates
/// words there, but any whitespace is treated as a boundary for robustness.
/// Punctuation also splits, so no token ever contains it.
pub fn tokenize(text: &str, doc_id: impl Into<String>) -> TokenStream {
    let tokens = text
        .split(|c: char| c.is_whitespace() || is_punctuation(c))
        .filter(|t| !t.is_empty())
        .map(str::to_owned)
        .collect();
    TokenStream::new(doc_id, tokens)
}

/// Remove every token present in the stopword set, preserving order.
pub fn remove_stopwords(stream: &TokenStream, stopwords: &HashSet<String>) -> TokenStream {
    TokenStream {
        doc_id: stream.doc_id.clone(),
        tokens: stream
            .tokens
            .iter()
            .filter(|t| !stopwords.contains(*t))
            .cloned()
            .collect(),
    }
}

/// The stopword list shipped with the crate (~60 Persian function words).
pub fn shipped_stopwords() -> &'static HashSet<String> {
    static SET: OnceLock<HashSet<String>> = OnceLock::new();
    SET.get_or_init(|| parse_stopwords(DEFAULT_STOPWORDS))
}

fn parse_stopwords(s: &str) -> HashSet<String> {
    s.lines()
        .map(|l| match l.find('#') {
            Some(i) => l[..i].trim(),
            None => l.trim(),
        })
        .filter(|l| !l.is_empty())
        .map(str::to_owned)
        .collect()
}

/// Load a stopword file: UTF-8, one word per line, `#` comments.
pub fn load_stopwords(path: &Path) -> Result<HashSet<String>> {
    Ok(parse_stopwords(&std::fs::read_to_string(path)?))
}

/// Suffix-stripping rules, ordered longest suffix first.
///
/// Each rule carries the minimum number of characters the remaining stem
/// must keep; a rule that would cut the stem below that length does not
/// fire. There is deliberately no `م` rule: stripping it turns `ارام` into
/// `ارا`, the over-stemming failure mode this stemmer exists to avoid.
#[derive(Debug, Clone)]
pub struct StemmerRules {
    rules: Vec<(String, usize)>,
}

impl StemmerRules {
    /// The rule set shipped with the crate.
    pub fn shipped() -> &'static StemmerRules {
        static RULES: OnceLock<StemmerRules> = OnceLock::new();
        RULES.get_or_init(|| {
            StemmerRules::from_str_rules(DEFAULT_STEM_RULES).expect("shipped stem rules are valid")
        })
    }

    /// Parse `SUFFIX<TAB>MINLEN` lines, `#` comments. Rules are reordered
    /// longest suffix first; same-length rules keep their file order.
    pub fn from_str_rules(s: &str) -> Result<Self> {
        let mut rules = Vec::new();
        for (lineno, raw) in s.lines().enumerate() {
            let line = match raw.find('#') {
                Some(i) => &raw[..i],
                None => raw,
            };
            if line.trim().is_empty() {
                continue;
            }
            let mut fields = line.split('\t');
            let suffix = fields.next().unwrap_or("").trim().to_owned();
            let min_len: usize = fields
                .next()
                .unwrap_or("")
                .trim()
                .parse()
                .map_err(|_| Error::InvalidTable(format!("stem rule line {}", lineno + 1)))?;
            if suffix.is_empty() {
                return Err(Error::InvalidTable(format!(
                    "empty suffix at line {}",
                    lineno + 1
                )));
            }
            rules.push((suffix, min_len));
        }
        rules.sort_by_key(|(s, _)| std::cmp::Reverse(s.chars().count()));
        Ok(StemmerRules { rules })
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        Self::from_str_rules(&std::fs::read_to_string(path)?)
    }

    pub fn rules(&self) -> &[(String, usize)] {
        &self.rules
    }
}

/// Strip suffixes from a token, one per pass, until no rule fires.
///
/// The result is a fixed point: `stem(stem(x)) == stem(x)`. A trailing ZWNJ
/// left behind by a strip is removed before the length guard is checked.
pub fn stem(token: &str, rules: &StemmerRules) -> String {
    let mut current = token.to_owned();
    while let Some(next) = strip_one_suffix(&current, rules) {
        current = next;
    }
    current
}

fn strip_one_suffix(token: &str, rules: &StemmerRules) -> Option<String> {
    for (suffix, min_len) in &rules.rules {
        if let Some(stem_part) = token.strip_suffix(suffix.as_str()) {
            let trimmed = stem_part.trim_end_matches(ZWNJ);
            if trimmed.chars().count() >= *min_len {
                return Some(trimmed.to_owned());
            }
        }
    }
    None
}

/// Apply [`stem`] to every token of a stream.
pub fn stem_stream(stream: &TokenStream, rules: &StemmerRules) -> TokenStream {
    TokenStream {
        doc_id: stream.doc_id.clone(),
        tokens: stream.tokens.iter().map(|t| stem(t, rules)).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn zwnj_words_stay_single_tokens() {
        let s = tokenize("بخش\u{200C}ها و فصل\u{200C}ها", "d");
        assert_eq!(s.tokens, vec!["بخش\u{200C}ها", "و", "فصل\u{200C}ها"]);
    }

    #[test]
    fn punctuation_splits_and_is_dropped() {
        let s = tokenize("خوب، خیلی خوب!", "d");
        assert_eq!(s.tokens, vec!["خوب", "خیلی", "خوب"]);
        let interior = tokenize("خوب،خیلی", "d");
        assert_eq!(interior.tokens, vec!["خوب", "خیلی"]);
    }

    #[test]
    fn empty_document() {
        assert!(tokenize("", "d").tokens.is_empty());
    }

    #[test]
    fn stopword_removal() {
        let stream = TokenStream::new("d", vec!["من".into(), "خوب".into(), "هستم".into()]);
        let set: HashSet<String> = ["من", "هستم"].iter().map(|s| s.to_string()).collect();
        assert_eq!(remove_stopwords(&stream, &set).tokens, vec!["خوب"]);
        assert_eq!(
            remove_stopwords(&stream, &HashSet::new()).tokens,
            stream.tokens
        );
        let all: HashSet<String> = stream.tokens.iter().cloned().collect();
        assert!(remove_stopwords(&stream, &all).tokens.is_empty());
    }

    #[test]
    fn stem_examples() {
        let r = StemmerRules::shipped();
        assert_eq!(stem("بخش\u{200C}ها", r), "بخش");
        assert_eq!(stem("بخشها", r), "بخش");
        assert_eq!(stem("خوب", r), "خوب");
        assert_eq!(stem("بخش\u{200C}هایی", r), "بخش");
        assert_eq!(stem("خوب\u{200C}تر", r), "خوب");
        assert_eq!(stem("بهترین", r), "به");
    }

    #[test]
    fn aram_is_not_overstemmed() {
        // the known failure case: no rule may turn «ارام» into «ارا»
        assert_eq!(stem("ارام", StemmerRules::shipped()), "ارام");
    }

    #[test]
    fn min_length_guard_holds() {
        let r = StemmerRules::from_str_rules("ها\t2\n").unwrap();
        assert_eq!(stem("اها", &r), "اها"); // stem would be 1 char
        assert_eq!(stem("ابها", &r), "اب");
    }

    fn token_char() -> impl Strategy<Value = char> {
        prop_oneof![
            prop::char::range('\u{0621}', '\u{06FF}'),
            prop::char::range('a', 'z'),
            Just(ZWNJ),
            Just(' '),
            Just('،'),
            Just('!'),
        ]
    }

    proptest! {
        #[test]
        fn tokens_never_contain_space_or_punct(s in proptest::collection::vec(token_char(), 0..60)) {
            let s: String = s.into_iter().collect();
            for t in tokenize(&s, "d").tokens {
                prop_assert!(!t.is_empty());
                prop_assert!(!t.chars().any(|c| c.is_whitespace() || is_punctuation(c)));
            }
        }

        #[test]
        fn stem_is_idempotent(s in proptest::collection::vec(token_char(), 1..12)) {
            let token: String = s.into_iter().filter(|c| *c != ' ').collect();
            let r = StemmerRules::shipped();
            let once = stem(&token, r);
            prop_assert_eq!(stem(&once, r), once.clone());
        }

        #[test]
        fn stopword_filter_is_a_subset_difference(
            tokens in proptest::collection::vec("[ا-ی]{1,4}", 0..20),
            stops in proptest::collection::vec("[ا-ی]{1,4}", 0..10),
        ) {
            let stream = TokenStream::new("d", tokens.clone());
            let set: HashSet<String> = stops.into_iter().collect();
            let filtered = remove_stopwords(&stream, &set);
            prop_assert!(filtered.tokens.len() <= stream.tokens.len());
            for t in &stream.tokens {
                if !set.contains(t) {
                    prop_assert!(filtered.tokens.contains(t));
                }
            }
            for t in &filtered.tokens {
                prop_assert!(!set.contains(t));
            }
        }
    }
}
