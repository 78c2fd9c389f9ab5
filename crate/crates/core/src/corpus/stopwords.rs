use std::collections::HashSet;
use std::sync::Arc;

use crate::error::{Error, Result};

const ENGLISH: &str = include_str!("../../data/stopwords_en.txt");

/// A versioned stop-word list.
///
/// File format: UTF-8, one word per line. Lines starting with `#` are
/// comments; the first comment line carries `<name> <semver>`.
#[derive(Debug, Clone)]
pub struct StopWords {
    version: String,
    words: Arc<HashSet<String>>,
}

impl StopWords {
    /// The shipped Snowball English list.
    pub fn english() -> Self {
        Self::parse(ENGLISH).expect("shipped stop-word list is well formed")
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut version = None;
        let mut words = HashSet::new();
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(comment) = line.strip_prefix('#') {
                if version.is_none() {
                    version = Some(comment.trim().to_string());
                }
                continue;
            }
            words.insert(line.to_lowercase());
        }
        let version = version
            .filter(|v| !v.is_empty())
            .ok_or_else(|| Error::validation("stopwords", "missing `# <name> <version>` header"))?;
        Ok(StopWords {
            version,
            words: Arc::new(words),
        })
    }

    pub fn empty() -> Self {
        StopWords {
            version: "empty 0.0.0".into(),
            words: Arc::new(HashSet::new()),
        }
    }

    pub fn version(&self) -> &str {
        &self.version
    }

    pub fn contains(&self, word: &str) -> bool {
        self.words.contains(word)
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.words.iter().map(String::as_str)
    }
}

impl Default for StopWords {
    fn default() -> Self {
        Self::english()
    }
}
