use std::collections::{BTreeMap, HashSet};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{stem, Corpus, Partition, StopWords, Utterance};
use crate::error::{Error, Result};

/// Characters stripped from both ends of a whitespace token.
pub const PUNCTUATION: &[char] = &[
    '.', ',', '!', '?', ';', ':', '\'', '"', '(', ')', '[', ']', '{', '}', '@', '#', '$', '%',
    '&', '*', '-',
];

/// Named tokenization settings.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PipelineProfile {
    pub name: String,
    pub lowercase: bool,
    pub strip_punctuation: bool,
    pub remove_stopwords: bool,
    pub stem: bool,
    pub drop_placeholders: bool,
}

impl PipelineProfile {
    pub const PRESETS: [&'static str; 4] = ["gendered_language", "pronouns", "marked_words", "names"];

    pub fn gendered_language() -> Self {
        Self::preset("gendered_language", true, true)
    }

    /// Keeps stop words, since the pronouns live there.
    pub fn pronouns() -> Self {
        Self::preset("pronouns", false, false)
    }

    pub fn marked_words() -> Self {
        Self::preset("marked_words", true, false)
    }

    pub fn names() -> Self {
        Self::preset("names", true, false)
    }

    fn preset(name: &str, remove_stopwords: bool, stem: bool) -> Self {
        PipelineProfile {
            name: name.to_string(),
            lowercase: true,
            strip_punctuation: true,
            remove_stopwords,
            stem,
            drop_placeholders: true,
        }
    }
}

impl FromStr for PipelineProfile {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gendered_language" => Ok(Self::gendered_language()),
            "pronouns" => Ok(Self::pronouns()),
            "marked_words" => Ok(Self::marked_words()),
            "names" => Ok(Self::names()),
            other => Err(Error::validation(
                "profile",
                format!(
                    "unknown profile `{other}` (expected one of {})",
                    Self::PRESETS.join(", ")
                ),
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenFlags {
    pub is_stopword: bool,
    pub is_placeholder: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Token {
    pub surface: String,
    pub norm: String,
    /// Porter2 stem of `norm`, or `norm` itself when stemming is off.
    pub stem: String,
    pub utterance_id: String,
    /// Position among the whitespace-separated tokens of the utterance.
    pub index: usize,
    pub flags: TokenFlags,
}

/// `@` followed by one or more ASCII digits (ReDial movie mentions).
pub fn is_placeholder(s: &str) -> bool {
    s.strip_prefix('@')
        .is_some_and(|d| !d.is_empty() && d.bytes().all(|b| b.is_ascii_digit()))
}

/// Trims [`PUNCTUATION`] from both ends, except that a placeholder followed
/// by trailing punctuation keeps its `@`.
pub fn strip_punctuation(s: &str) -> &str {
    let tail_trimmed = s.trim_end_matches(|c| c != '@' && PUNCTUATION.contains(&c));
    if is_placeholder(tail_trimmed) {
        return tail_trimmed;
    }
    s.trim_matches(PUNCTUATION)
}

/// A profile bound to a stop-word list.
#[derive(Debug, Clone)]
pub struct Pipeline {
    pub profile: PipelineProfile,
    pub stopwords: StopWords,
}

impl Pipeline {
    pub fn new(profile: PipelineProfile, stopwords: StopWords) -> Self {
        Pipeline { profile, stopwords }
    }

    pub fn tokenize(&self, u: &Utterance) -> Vec<Token> {
        tokenize(u, &self.profile, &self.stopwords)
    }
}

/// Every whitespace token with a non-empty normalized form, before any
/// stop-word or placeholder filtering.
fn analyze(u: &Utterance, p: &PipelineProfile, stopwords: &StopWords) -> Vec<Token> {
    let mut out = Vec::new();
    for (index, surface) in u.text.split_whitespace().enumerate() {
        let lowered;
        let cased = if p.lowercase {
            lowered = surface.to_lowercase();
            lowered.as_str()
        } else {
            surface
        };
        let placeholder = is_placeholder(strip_punctuation(surface));
        let norm = if p.strip_punctuation {
            strip_punctuation(cased)
        } else {
            cased
        };
        if norm.is_empty() {
            continue;
        }
        let is_stopword = stopwords.contains(norm);
        let stemmed = if p.stem && !placeholder {
            stem(norm)
        } else {
            norm.to_string()
        };
        out.push(Token {
            surface: surface.to_string(),
            norm: norm.to_string(),
            stem: stemmed,
            utterance_id: u.id.clone(),
            index,
            flags: TokenFlags {
                is_stopword,
                is_placeholder: placeholder,
            },
        });
    }
    out
}

/// Whitespace split, then lowercase, punctuation strip, placeholder drop,
/// stop-word removal and stemming as enabled by `p`.
pub fn tokenize(u: &Utterance, p: &PipelineProfile, stopwords: &StopWords) -> Vec<Token> {
    analyze(u, p, stopwords)
        .into_iter()
        .filter(|t| !(p.drop_placeholders && t.flags.is_placeholder))
        .filter(|t| !(p.remove_stopwords && t.flags.is_stopword))
        .collect()
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusStats {
    /// Whitespace tokens before stop-word removal.
    pub total_tokens: usize,
    /// Distinct normalized forms, stop words included.
    pub unique_surface: usize,
    /// Distinct processed forms after the full pipeline.
    pub unique_processed: usize,
    pub per_partition_counts: BTreeMap<Partition, usize>,
}

pub fn corpus_stats(c: &Corpus, p: &PipelineProfile, stopwords: &StopWords) -> CorpusStats {
    let per_utterance: Vec<(Partition, Vec<Token>)> = c
        .utterances
        .par_iter()
        .map(|u| (u.partition, analyze(u, p, stopwords)))
        .collect();

    let mut stats = CorpusStats::default();
    let mut surface: HashSet<&str> = HashSet::new();
    let mut processed: HashSet<&str> = HashSet::new();
    for (partition, tokens) in &per_utterance {
        stats.total_tokens += tokens.len();
        *stats.per_partition_counts.entry(*partition).or_default() += tokens.len();
        for t in tokens {
            surface.insert(&t.norm);
            let dropped = (p.drop_placeholders && t.flags.is_placeholder)
                || (p.remove_stopwords && t.flags.is_stopword);
            if !dropped {
                processed.insert(&t.stem);
            }
        }
    }
    stats.unique_surface = surface.len();
    stats.unique_processed = processed.len();
    stats
}
