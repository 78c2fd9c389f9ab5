//! Gendered dictionaries: entries, glob matchers, thresholds, merging and
//! AVA (ambiguous term) handling.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::corpus::{stem, strip_punctuation, StopWords};
use crate::error::{Error, Result};

mod ava;
mod glob;
mod load;
mod threshold;

pub use ava::{parse_ava, shipped_ava, write_ava, AvaEntry, SHIPPED_AVA};
pub use glob::{compile_glob, Matcher};
pub use load::{load_dictionary, parse_dictionary, DictFormat, Loaded, LoadedSource};
pub use threshold::{
    apply_threshold, PolicyName, ScoredList, ScoredWord, ThresholdPolicy, SCORE_CENTRE, SCORE_MAX,
    SCORE_MIN,
};

#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(rename_all = "lowercase")]
pub enum GenderClass {
    Masculine,
    Feminine,
    Neutral,
    Neo,
    Other,
}

impl GenderClass {
    pub const ALL: [GenderClass; 5] = [
        GenderClass::Masculine,
        GenderClass::Feminine,
        GenderClass::Neutral,
        GenderClass::Neo,
        GenderClass::Other,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            GenderClass::Masculine => "masculine",
            GenderClass::Feminine => "feminine",
            GenderClass::Neutral => "neutral",
            GenderClass::Neo => "neo",
            GenderClass::Other => "other",
        }
    }

    /// Single-letter code used by tagged word lists and AVA files.
    pub fn code(self) -> &'static str {
        match self {
            GenderClass::Masculine => "m",
            GenderClass::Feminine => "f",
            GenderClass::Neutral => "n",
            GenderClass::Neo => "neo",
            GenderClass::Other => "o",
        }
    }

    pub fn from_code(code: &str) -> Result<Self> {
        match code {
            "m" => Ok(GenderClass::Masculine),
            "f" => Ok(GenderClass::Feminine),
            "n" => Ok(GenderClass::Neutral),
            "o" => Ok(GenderClass::Other),
            "neo" => Ok(GenderClass::Neo),
            other => Err(Error::validation(
                "gender",
                format!("unknown gender code `{other}`"),
            )),
        }
    }

    /// Short column label as used in report headers.
    pub fn label(self) -> &'static str {
        match self {
            GenderClass::Masculine => "Masc.",
            GenderClass::Feminine => "Fem.",
            GenderClass::Neutral => "Neu.",
            GenderClass::Neo => "Neo.",
            GenderClass::Other => "Oth.",
        }
    }
}

impl fmt::Display for GenderClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for GenderClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "masculine" => Ok(GenderClass::Masculine),
            "feminine" => Ok(GenderClass::Feminine),
            "neutral" => Ok(GenderClass::Neutral),
            "neo" => Ok(GenderClass::Neo),
            "other" => Ok(GenderClass::Other),
            _ => GenderClass::from_code(s),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Category {
    GenderedLanguage,
    Pronoun,
    MarkedWord,
    Name,
}

impl Category {
    pub fn as_str(self) -> &'static str {
        match self {
            Category::GenderedLanguage => "gendered_language",
            Category::Pronoun => "pronoun",
            Category::MarkedWord => "marked_word",
            Category::Name => "name",
        }
    }

    /// Gendered-language entries meet tokens in stem space; all other
    /// categories match unstemmed norms.
    pub fn matches_stems(self) -> bool {
        self == Category::GenderedLanguage
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Category {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gendered_language" => Ok(Category::GenderedLanguage),
            "pronoun" => Ok(Category::Pronoun),
            "marked_word" => Ok(Category::MarkedWord),
            "name" => Ok(Category::Name),
            other => Err(Error::validation(
                "category",
                format!("unknown category `{other}`"),
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DictEntry {
    pub pattern: String,
    pub gender: GenderClass,
    pub category: Category,
    pub source_id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub score: Option<f64>,
    /// Set by [`subtract`] in flag mode.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub ambiguous: bool,
}

impl DictEntry {
    pub fn new(
        pattern: impl Into<String>,
        gender: GenderClass,
        category: Category,
        source_id: impl Into<String>,
    ) -> Self {
        DictEntry {
            pattern: pattern.into(),
            gender,
            category,
            source_id: source_id.into(),
            score: None,
            ambiguous: false,
        }
    }

    pub fn key(&self) -> (&str, GenderClass) {
        (&self.pattern, self.gender)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct DictMetadata {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub year: Option<u16>,
    #[serde(default)]
    pub gendering: Vec<GenderClass>,
    #[serde(default)]
    pub word_sources: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub categorization_method: Option<String>,
    /// Source ids contributing entries, in first-seen order.
    #[serde(default)]
    pub sources: Vec<String>,
}

/// Validates a raw pattern: non-empty, single token.
pub(crate) fn validate_pattern(pattern: &str) -> Result<()> {
    if pattern.trim().is_empty() {
        return Err(Error::validation("pattern", "empty pattern"));
    }
    if pattern.trim().chars().any(char::is_whitespace) {
        return Err(Error::validation(
            "pattern",
            format!("multi-word pattern `{pattern}` is not supported"),
        ));
    }
    Ok(())
}

fn has_wildcard(pattern: &str) -> bool {
    pattern.contains(['*', '?'])
}

/// Brings a raw pattern into the space its category is matched in.
///
/// Returns `None` when the pattern vanishes (a stop word in the
/// gendered-language category, or pure punctuation).
pub fn normalize_pattern(pattern: &str, category: Category, stopwords: &StopWords) -> Option<String> {
    let lowered = pattern.trim().to_lowercase();
    if has_wildcard(&lowered) {
        return Some(lowered);
    }
    let norm = strip_punctuation(&lowered);
    if norm.is_empty() {
        return None;
    }
    if category.matches_stems() {
        if stopwords.contains(norm) {
            return None;
        }
        Some(stem(norm))
    } else {
        Some(norm.to_string())
    }
}

/// A deduplicated list of gendered patterns.
///
/// No two entries share a `(pattern, gender)` key; entry order is the order
/// in which keys were first seen.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dictionary {
    pub name: String,
    entries: Vec<DictEntry>,
    #[serde(default)]
    pub metadata: DictMetadata,
}

impl Dictionary {
    /// Normalizes and deduplicates with the shipped English stop list.
    pub fn new(name: impl Into<String>, entries: Vec<DictEntry>, metadata: DictMetadata) -> Self {
        Self::build(name, entries, metadata, &StopWords::english()).0
    }

    /// Returns the dictionary and the number of entries dropped as
    /// duplicates or stop words.
    pub fn build(
        name: impl Into<String>,
        entries: Vec<DictEntry>,
        mut metadata: DictMetadata,
        stopwords: &StopWords,
    ) -> (Self, usize) {
        let total = entries.len();
        let mut seen: HashSet<(String, GenderClass)> = HashSet::with_capacity(total);
        let mut kept = Vec::with_capacity(total);
        for mut e in entries {
            let Some(norm) = normalize_pattern(&e.pattern, e.category, stopwords) else {
                continue;
            };
            e.pattern = norm;
            if seen.insert((e.pattern.clone(), e.gender)) {
                if !metadata.sources.contains(&e.source_id) {
                    metadata.sources.push(e.source_id.clone());
                }
                if !metadata.gendering.contains(&e.gender) {
                    metadata.gendering.push(e.gender);
                }
                kept.push(e);
            }
        }
        let dropped = total - kept.len();
        (
            Dictionary {
                name: name.into(),
                entries: kept,
                metadata,
            },
            dropped,
        )
    }

    pub fn empty(name: impl Into<String>) -> Self {
        Dictionary {
            name: name.into(),
            entries: Vec::new(),
            metadata: DictMetadata::default(),
        }
    }

    pub fn entries(&self) -> &[DictEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn contains(&self, pattern: &str, gender: GenderClass) -> bool {
        self.entries
            .iter()
            .any(|e| e.pattern == pattern && e.gender == gender)
    }

    pub fn categories(&self) -> Vec<Category> {
        let mut cats: Vec<Category> = self.entries.iter().map(|e| e.category).collect();
        cats.sort();
        cats.dedup();
        cats
    }

    /// Gender classes present, in canonical order.
    pub fn genders(&self) -> Vec<GenderClass> {
        let mut g: Vec<GenderClass> = self.entries.iter().map(|e| e.gender).collect();
        g.sort();
        g.dedup();
        g
    }

    pub fn count_by_gender(&self) -> HashMap<GenderClass, usize> {
        let mut out = HashMap::new();
        for e in &self.entries {
            *out.entry(e.gender).or_insert(0) += 1;
        }
        out
    }

    /// Serializes entries as JSONL, the tool's own dictionary export.
    pub fn to_entries_jsonl(&self) -> String {
        let mut out = String::new();
        for e in &self.entries {
            out.push_str(&serde_json::to_string(e).expect("entries serialize"));
            out.push('\n');
        }
        out
    }
}

/// Set union keyed on `(pattern, gender)`. Conflicting genders for one
/// pattern are kept as separate entries.
pub fn merge(dicts: &[Dictionary]) -> Dictionary {
    let name = dicts
        .iter()
        .map(|d| d.name.as_str())
        .collect::<Vec<_>>()
        .join("+");
    let mut metadata = DictMetadata::default();
    for d in dicts {
        for s in &d.metadata.word_sources {
            if !metadata.word_sources.contains(s) {
                metadata.word_sources.push(s.clone());
            }
        }
    }
    let mut seen: HashSet<(String, GenderClass)> = HashSet::new();
    let mut entries = Vec::new();
    for d in dicts {
        for e in &d.entries {
            if seen.insert((e.pattern.clone(), e.gender)) {
                if !metadata.sources.contains(&e.source_id) {
                    metadata.sources.push(e.source_id.clone());
                }
                if !metadata.gendering.contains(&e.gender) {
                    metadata.gendering.push(e.gender);
                }
                entries.push(e.clone());
            }
        }
    }
    Dictionary {
        name,
        entries,
        metadata,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AvaMode {
    /// Delete ambiguous entries.
    Remove,
    /// Keep ambiguous entries but mark them; matches inherit the mark.
    Flag,
}

impl FromStr for AvaMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "remove" => Ok(AvaMode::Remove),
            "flag" => Ok(AvaMode::Flag),
            other => Err(Error::validation(
                "ava_mode",
                format!("unknown AVA mode `{other}` (expected remove or flag)"),
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Subtraction {
    pub dictionary: Dictionary,
    /// AVA terms that matched no entry of the input dictionary.
    pub absent_terms: usize,
}

/// Removes or flags entries whose normalized pattern equals a normalized AVA
/// term, and wildcard entries that would match the term as a token.
pub fn subtract(d: &Dictionary, terms: &[AvaEntry], mode: AvaMode) -> Subtraction {
    subtract_with(d, terms, mode, &StopWords::english())
}

pub fn subtract_with(
    d: &Dictionary,
    terms: &[AvaEntry],
    mode: AvaMode,
    stopwords: &StopWords,
) -> Subtraction {
    let stemmed: Vec<Option<String>> = terms
        .iter()
        .map(|t| normalize_pattern(&t.term, Category::GenderedLanguage, stopwords))
        .collect();
    let plain: Vec<Option<String>> = terms
        .iter()
        .map(|t| normalize_pattern(&t.term, Category::Pronoun, stopwords))
        .collect();

    let mut hit = vec![false; terms.len()];
    let mut entries = Vec::with_capacity(d.entries.len());
    for e in &d.entries {
        let space = if e.category.matches_stems() {
            &stemmed
        } else {
            &plain
        };
        let glob = has_wildcard(&e.pattern)
            .then(|| compile_glob(&e.pattern).ok())
            .flatten();
        let mut ambiguous = false;
        for (i, t) in space.iter().enumerate() {
            let Some(t) = t.as_deref() else { continue };
            if t == e.pattern || glob.as_ref().is_some_and(|g| g.is_match(t)) {
                hit[i] = true;
                ambiguous = true;
            }
        }
        match (ambiguous, mode) {
            (true, AvaMode::Remove) => {}
            (true, AvaMode::Flag) => entries.push(DictEntry {
                ambiguous: true,
                ..e.clone()
            }),
            (false, _) => entries.push(e.clone()),
        }
    }
    let suffix = match mode {
        AvaMode::Remove => "without AVA",
        AvaMode::Flag => "AVA flagged",
    };
    Subtraction {
        dictionary: Dictionary {
            name: format!("{} ({suffix})", d.name),
            entries,
            metadata: d.metadata.clone(),
        },
        absent_terms: hit.iter().filter(|h| !**h).count(),
    }
}
