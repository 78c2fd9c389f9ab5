use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{Category, DictEntry, DictMetadata, Dictionary, GenderClass};
use crate::corpus::StopWords;
use crate::error::{Error, Result};

/// Rating scale bounds and neutral centre for scored word lists.
pub const SCORE_MIN: f64 = 1.0;
pub const SCORE_MAX: f64 = 7.0;
pub const SCORE_CENTRE: f64 = 4.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoredWord {
    pub word: String,
    pub score: f64,
}

/// A scored source list, not yet split into genders.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoredList {
    pub source_id: String,
    pub words: Vec<ScoredWord>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PolicyName {
    Loose,
    Conservative,
}

impl fmt::Display for PolicyName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PolicyName::Loose => "loose",
            PolicyName::Conservative => "conservative",
        })
    }
}

/// Cut-offs on a 1-7 femininity/masculinity scale.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdPolicy {
    pub name: PolicyName,
    pub fem_bound: f64,
    pub fem_inclusive: bool,
    pub masc_bound: f64,
    pub masc_inclusive: bool,
}

impl ThresholdPolicy {
    /// fem <= 3.0, masc >= 5.0
    pub const fn loose() -> Self {
        ThresholdPolicy {
            name: PolicyName::Loose,
            fem_bound: 3.0,
            fem_inclusive: true,
            masc_bound: 5.0,
            masc_inclusive: true,
        }
    }

    /// fem < 2.5, masc > 5.5
    pub const fn conservative() -> Self {
        ThresholdPolicy {
            name: PolicyName::Conservative,
            fem_bound: 2.5,
            fem_inclusive: false,
            masc_bound: 5.5,
            masc_inclusive: false,
        }
    }

    pub fn classify(&self, score: f64) -> Option<GenderClass> {
        let masc = if self.masc_inclusive {
            score >= self.masc_bound
        } else {
            score > self.masc_bound
        };
        let fem = if self.fem_inclusive {
            score <= self.fem_bound
        } else {
            score < self.fem_bound
        };
        match (masc, fem) {
            (true, _) => Some(GenderClass::Masculine),
            (_, true) => Some(GenderClass::Feminine),
            _ => None,
        }
    }
}

impl FromStr for ThresholdPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "loose" => Ok(Self::loose()),
            "conservative" => Ok(Self::conservative()),
            other => Err(Error::validation(
                "threshold",
                format!("unknown threshold policy `{other}`"),
            )),
        }
    }
}

/// Splits a scored list into masculine and feminine entries; words between
/// the bounds are excluded. The result is normalized like any dictionary.
pub fn apply_threshold(scored: &ScoredList, policy: &ThresholdPolicy) -> Result<Dictionary> {
    let mut entries = Vec::new();
    for w in &scored.words {
        if !(SCORE_MIN..=SCORE_MAX).contains(&w.score) || w.score.is_nan() {
            return Err(Error::validation(
                "score",
                format!("score {} for `{}` outside [1, 7]", w.score, w.word),
            ));
        }
        if let Some(gender) = policy.classify(w.score) {
            entries.push(DictEntry {
                score: Some(w.score),
                ..DictEntry::new(&w.word, gender, Category::GenderedLanguage, &scored.source_id)
            });
        }
    }
    let name = format!("{} ({})", scored.source_id, policy.name);
    let metadata = DictMetadata {
        gendering: vec![GenderClass::Masculine, GenderClass::Neutral, GenderClass::Feminine],
        ..Default::default()
    };
    Ok(Dictionary::build(name, entries, metadata, &StopWords::english()).0)
}
