//! Persian text normalization.
//!
//! User-generated Persian text mixes Arabic and Persian code points for the
//! same letters, sprinkles optional diacritics, pads words with TATWEEL, and
//! writes suffixed words in three surface forms (plain space, ZWNJ, fused).
//! Each variant fragments token identity and splits one feature into several.
//! [`normalize`] canonicalizes all of them into a single form:
//!
//! 1. character unification via the rule table (`ي` → `ی`, `ك` → `ک`, digits
//!    to ASCII, invisible directional marks dropped),
//! 2. deletion of harakat (U+064B..U+0652) and TATWEEL (U+0640),
//! 3. ZWNJ canonicalization around listed affixes (space-separated and fused
//!    suffixes both become ZWNJ-joined),
//! 4. whitespace collapse and trim.
//!
//! The canonical affix form is the ZWNJ join: it renders with the correct
//! final-form glyph while keeping the word a single whitespace-delimited
//! token.

use std::collections::HashMap;
use std::path::Path;
use std::sync::OnceLock;

use crate::error::{Error, Result};

/// Zero Width Non-Joiner, the intra-word separator of Persian orthography.
pub const ZWNJ: char = '\u{200C}';
/// TATWEEL, a purely visual elongation character.
pub const TATWEEL: char = '\u{0640}';

const DEFAULT_TABLE: &str = include_str!("data/norm_table.tsv");
const DEFAULT_AFFIXES: &str = include_str!("data/affixes.txt");
const DEFAULT_FENGLISH: &str = include_str!("data/fenglish.tsv");

/// Arabic short-vowel diacritics (harakat) are always stripped.
fn is_harakat(c: char) -> bool {
    ('\u{064B}'..='\u{0652}').contains(&c)
}

/// Character unification rules plus the affix list for ZWNJ canonicalization.
///
/// Immutable after load; safe to share across threads.
#[derive(Debug, Clone)]
pub struct NormalizationTable {
    /// Source code point to canonical code point; `None` deletes.
    char_map: HashMap<char, Option<char>>,
    /// Suffixes that are ZWNJ-joined to the preceding word, longest first.
    affixes: Vec<String>,
}

impl NormalizationTable {
    /// The table shipped with the crate.
    pub fn shipped() -> &'static NormalizationTable {
        static TABLE: OnceLock<NormalizationTable> = OnceLock::new();
        TABLE.get_or_init(|| {
            NormalizationTable::from_strs(DEFAULT_TABLE, DEFAULT_AFFIXES)
                .expect("shipped normalization table is valid")
        })
    }

    /// Parse a rule table and an affix list.
    ///
    /// Rule lines are `SRC<TAB>DST` as hex code points, empty `DST` deletes;
    /// affix lines hold one suffix each. `#` starts a comment in both.
    pub fn from_strs(table: &str, affixes: &str) -> Result<Self> {
        let mut char_map = HashMap::new();
        for (lineno, raw) in table.lines().enumerate() {
            let line = strip_comment(raw);
            if line.trim().is_empty() {
                continue;
            }
            let mut fields = line.split('\t');
            let src = parse_hex_char(fields.next().unwrap_or(""), lineno)?;
            let dst_field = fields.next().unwrap_or("").trim();
            let dst = if dst_field.is_empty() {
                None
            } else {
                Some(parse_hex_char(dst_field, lineno)?)
            };
            char_map.insert(src, dst);
        }
        let mut affix_list: Vec<String> = affixes
            .lines()
            .map(strip_comment)
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .map(str::to_owned)
            .collect();
        // longest first so the most specific affix wins
        affix_list.sort_by(|a, b| {
            b.chars()
                .count()
                .cmp(&a.chars().count())
                .then_with(|| a.cmp(b))
        });
        affix_list.dedup();
        let table = NormalizationTable {
            char_map,
            affixes: affix_list,
        };
        table.validate()?;
        Ok(table)
    }

    /// Load the two table files from disk.
    pub fn from_files(table: &Path, affixes: &Path) -> Result<Self> {
        let t = std::fs::read_to_string(table)?;
        let a = std::fs::read_to_string(affixes)?;
        Self::from_strs(&t, &a)
    }

    /// Every mapping target must be a fixed point of the map.
    fn validate(&self) -> Result<()> {
        for (src, dst) in &self.char_map {
            if let Some(d) = dst {
                if self.char_map.contains_key(d) {
                    return Err(Error::InvalidTable(format!(
                        "U+{:04X} maps to U+{:04X}, which is itself a key",
                        *src as u32, *d as u32
                    )));
                }
            }
        }
        for affix in &self.affixes {
            if affix.chars().any(|c| {
                self.char_map.contains_key(&c) || is_harakat(c) || c == TATWEEL
            }) {
                return Err(Error::InvalidTable(format!(
                    "affix {affix:?} is not in canonical form"
                )));
            }
        }
        Ok(())
    }

    /// Affixes that are ZWNJ-joined, longest first.
    pub fn affixes(&self) -> &[String] {
        &self.affixes
    }

    fn is_affix(&self, s: &str) -> bool {
        self.affixes.iter().any(|a| a == s)
    }
}

fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    }
}

fn parse_hex_char(field: &str, lineno: usize) -> Result<char> {
    let v = u32::from_str_radix(field.trim(), 16)
        .map_err(|_| Error::InvalidTable(format!("line {}: bad code point {field:?}", lineno + 1)))?;
    char::from_u32(v)
        .ok_or_else(|| Error::InvalidTable(format!("line {}: U+{v:04X} is not a character", lineno + 1)))
}

/// A string guaranteed to contain only canonical code points, together with
/// the identifiers of the rules that fired while producing it.
///
/// `applied_rules` is empty exactly when the output equals the input.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalizedText {
    pub text: String,
    pub applied_rules: Vec<String>,
}

impl NormalizedText {
    pub fn as_str(&self) -> &str {
        &self.text
    }
}

/// Canonicalize raw Persian text. Total: never fails, any Unicode input is
/// accepted and the result is stable under re-normalization.
pub fn normalize(raw: &str, table: &NormalizationTable) -> NormalizedText {
    let mut rules = RuleLog::new();

    // (1) character unification, (2) harakat/TATWEEL deletion
    let mut mapped = String::with_capacity(raw.len());
    for c in raw.chars() {
        if let Some(dst) = table.char_map.get(&c) {
            match dst {
                Some(d) => {
                    mapped.push(*d);
                    rules.fire(format!("map:{:04X}->{:04X}", c as u32, *d as u32));
                }
                None => rules.fire(format!("drop:{:04X}", c as u32)),
            }
        } else if is_harakat(c) {
            rules.fire("strip:harakat".to_owned());
        } else if c == TATWEEL {
            rules.fire("strip:tatweel".to_owned());
        } else {
            mapped.push(c);
        }
    }

    // (3) ZWNJ canonicalization
    let cleaned = remove_orphan_zwnj(&mapped);
    if cleaned != mapped {
        rules.fire("zwnj:orphan".to_owned());
    }
    let joined = join_spaced_affixes(&cleaned, table, &mut rules);
    let defused = defuse_fused_affixes(&joined, table, &mut rules);

    // (4) whitespace collapse and trim
    let collapsed = collapse_whitespace(&defused);
    if collapsed != defused {
        rules.fire("ws:collapse".to_owned());
    }

    NormalizedText {
        text: collapsed,
        applied_rules: rules.into_vec(),
    }
}

/// Ordered set of fired rule identifiers.
struct RuleLog(Vec<String>);

impl RuleLog {
    fn new() -> Self {
        RuleLog(Vec::new())
    }
    fn fire(&mut self, id: String) {
        if !self.0.contains(&id) {
            self.0.push(id);
        }
    }
    fn into_vec(self) -> Vec<String> {
        self.0
    }
}

/// Drop ZWNJ at string boundaries or adjacent to whitespace, and collapse
/// ZWNJ runs to a single one. Runs collapse first so the neighbor checks
/// see real characters.
fn remove_orphan_zwnj(s: &str) -> String {
    let mut collapsed = Vec::with_capacity(s.len());
    for c in s.chars() {
        if c == ZWNJ && collapsed.last() == Some(&ZWNJ) {
            continue;
        }
        collapsed.push(c);
    }
    let mut out = String::with_capacity(s.len());
    for (i, &c) in collapsed.iter().enumerate() {
        if c == ZWNJ {
            let prev_ok = i > 0 && !collapsed[i - 1].is_whitespace();
            let next_ok = collapsed
                .get(i + 1)
                .is_some_and(|n| !n.is_whitespace());
            if !(prev_ok && next_ok) {
                continue;
            }
        }
        out.push(c);
    }
    out
}

/// Split the maximal run of trailing punctuation off a token, so an affix
/// followed by a comma or closing quote is still recognized.
fn split_punctuation_tail(token: &str) -> (&str, &str) {
    let cut = token
        .char_indices()
        .rev()
        .take_while(|(_, c)| crate::tokenize::is_punctuation(*c))
        .last()
        .map_or(token.len(), |(i, _)| i);
    token.split_at(cut)
}

/// Replace the whitespace before a listed affix token with ZWNJ, when the
/// affix follows a word ending in a letter. `"بخش ها"` becomes `"بخش‌ها"`;
/// trailing punctuation on the affix is kept (`"بخش ها،"` joins too).
fn join_spaced_affixes(s: &str, table: &NormalizationTable, rules: &mut RuleLog) -> String {
    let chars: Vec<char> = s.chars().collect();
    let mut out = String::with_capacity(s.len());
    let mut i = 0;
    while i < chars.len() {
        if chars[i].is_whitespace() {
            let ws_start = i;
            while i < chars.len() && chars[i].is_whitespace() {
                i += 1;
            }
            let tok_start = i;
            while i < chars.len() && !chars[i].is_whitespace() {
                i += 1;
            }
            let token: String = chars[tok_start..i].iter().collect();
            let (core, tail) = split_punctuation_tail(&token);
            let prev_is_letter = out.chars().next_back().is_some_and(|c| c.is_alphabetic());
            if prev_is_letter && !core.is_empty() && table.is_affix(core) {
                out.push(ZWNJ);
                out.push_str(core);
                out.push_str(tail);
                rules.fire(format!("zwnj:space_join:{core}"));
            } else {
                out.extend(&chars[ws_start..i]);
            }
        } else {
            out.push(chars[i]);
            i += 1;
        }
    }
    out
}

/// Insert ZWNJ before a listed affix written fused to its stem.
/// `"بخشها"` becomes `"بخش‌ها"`. The stem must keep at least two characters
/// and end in a letter; already-joined forms are left alone.
fn defuse_fused_affixes(s: &str, table: &NormalizationTable, rules: &mut RuleLog) -> String {
    let mut out = String::with_capacity(s.len());
    for (i, part) in s.split(' ').enumerate() {
        if i > 0 {
            out.push(' ');
        }
        out.push_str(&defuse_token(part, table, rules));
    }
    out
}

fn defuse_token(token: &str, table: &NormalizationTable, rules: &mut RuleLog) -> String {
    let (core, tail) = split_punctuation_tail(token);
    for affix in &table.affixes {
        if let Some(stem) = core.strip_suffix(affix.as_str()) {
            let last = stem.chars().next_back();
            let stem_len = stem.chars().count();
            if stem_len >= 2 && last.is_some_and(|c| c.is_alphabetic() && c != ZWNJ) {
                rules.fire(format!("zwnj:defuse:{affix}"));
                return format!("{stem}{ZWNJ}{affix}{tail}");
            }
            // longest matching affix decides; do not try shorter ones
            return token.to_owned();
        }
    }
    token.to_owned()
}

/// Collapse whitespace runs into single ASCII spaces and trim the ends.
fn collapse_whitespace(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    let mut pending = false;
    for c in s.chars() {
        if c.is_whitespace() {
            pending = !out.is_empty();
        } else {
            if pending {
                out.push(' ');
                pending = false;
            }
            out.push(c);
        }
    }
    out
}

/// FEnglish (Latin-script Persian) to Persian-script mapping.
///
/// Multi-letter sources are digraphs and are matched before any of their
/// single-letter prefixes; matching is greedy, longest first, left to right.
#[derive(Debug, Clone)]
pub struct TransliterationTable {
    digraphs: Vec<(String, String)>,
    singles: HashMap<char, String>,
}

impl TransliterationTable {
    /// The best-effort table shipped with the crate. There is no official
    /// FEnglish orthography; ambiguous phonemes resolve to the most frequent
    /// Persian letter, as documented in the table file.
    pub fn shipped() -> &'static TransliterationTable {
        static TABLE: OnceLock<TransliterationTable> = OnceLock::new();
        TABLE.get_or_init(|| {
            TransliterationTable::from_str_table(DEFAULT_FENGLISH)
                .expect("shipped transliteration table is valid")
        })
    }

    /// Parse `SRC<TAB>DST` lines; empty `DST` deletes the source letters.
    pub fn from_str_table(s: &str) -> Result<Self> {
        let mut digraphs = Vec::new();
        let mut singles = HashMap::new();
        for raw in s.lines() {
            let line = strip_comment(raw);
            if line.trim().is_empty() {
                continue;
            }
            let mut fields = line.split('\t');
            let src = fields.next().unwrap_or("").trim().to_lowercase();
            let dst = fields.next().unwrap_or("").trim().to_owned();
            if src.is_empty() {
                return Err(Error::InvalidTable("empty transliteration source".into()));
            }
            if src.chars().count() >= 2 {
                digraphs.push((src, dst));
            } else {
                singles.insert(src.chars().next().unwrap(), dst);
            }
        }
        Ok(TransliterationTable { digraphs, singles })
    }
}

/// Convert FEnglish text to Persian script and normalize the result.
///
/// Characters with no mapping pass through unchanged; the function is total.
pub fn transliterate_fenglish(
    latin: &str,
    table: &TransliterationTable,
    norm: &NormalizationTable,
) -> NormalizedText {
    let lower = latin.to_lowercase();
    let chars: Vec<char> = lower.chars().collect();
    let mut out = String::with_capacity(latin.len() * 2);
    let mut i = 0;
    'outer: while i < chars.len() {
        for (src, dst) in &table.digraphs {
            let n = src.chars().count();
            if i + n <= chars.len() && chars[i..i + n].iter().collect::<String>() == *src {
                out.push_str(dst);
                i += n;
                continue 'outer;
            }
        }
        match table.singles.get(&chars[i]) {
            Some(dst) => out.push_str(dst),
            None => out.push(chars[i]),
        }
        i += 1;
    }
    normalize(&out, norm)
}
