//! Corpus ingestion and tokenization.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

mod massive;
mod redial;
mod stem;
mod stopwords;
mod tokenize;

pub use massive::parse_massive;
pub use redial::parse_redial;
pub use stem::stem;
pub use stopwords::StopWords;
pub use tokenize::{
    corpus_stats, is_placeholder, strip_punctuation, tokenize, CorpusStats, Pipeline,
    PipelineProfile, Token, TokenFlags, PUNCTUATION,
};

/// Machine-learning data split an utterance belongs to.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(rename_all = "lowercase")]
pub enum Partition {
    Dev,
    Test,
    Train,
    Unpartitioned,
}

impl Partition {
    pub fn as_str(self) -> &'static str {
        match self {
            Partition::Train => "train",
            Partition::Dev => "dev",
            Partition::Test => "test",
            Partition::Unpartitioned => "unpartitioned",
        }
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Partition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "train" => Ok(Partition::Train),
            "dev" => Ok(Partition::Dev),
            "test" => Ok(Partition::Test),
            "unpartitioned" => Ok(Partition::Unpartitioned),
            other => Err(Error::validation(
                "partition",
                format!("unknown partition `{other}`"),
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SourceFormat {
    MassiveJsonl,
    RedialJson,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Utterance {
    pub id: String,
    pub partition: Partition,
    pub text: String,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub meta: BTreeMap<String, String>,
}

/// An ordered, immutable collection of utterances from one dataset.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Corpus {
    pub name: String,
    pub source_format: SourceFormat,
    pub utterances: Vec<Utterance>,
}

impl Corpus {
    /// Builds a corpus, rejecting empty or duplicate utterance ids.
    pub fn new(
        name: impl Into<String>,
        source_format: SourceFormat,
        utterances: Vec<Utterance>,
    ) -> Result<Self> {
        let mut seen = HashSet::with_capacity(utterances.len());
        for u in &utterances {
            if u.id.is_empty() {
                return Err(Error::validation("id", "utterance id is empty"));
            }
            if !seen.insert(u.id.as_str()) {
                return Err(Error::validation(
                    "id",
                    format!("duplicate utterance id `{}`", u.id),
                ));
            }
        }
        Ok(Corpus {
            name: name.into(),
            source_format,
            utterances,
        })
    }

    /// Concatenates corpora of the same format, e.g. ReDial train and test files.
    pub fn concat(name: impl Into<String>, parts: Vec<Corpus>) -> Result<Self> {
        let format = match parts.first() {
            Some(c) => c.source_format,
            None => return Corpus::new(name, SourceFormat::MassiveJsonl, Vec::new()),
        };
        if parts.iter().any(|c| c.source_format != format) {
            return Err(Error::Config(
                "cannot concatenate corpora of different formats".into(),
            ));
        }
        let utterances = parts.into_iter().flat_map(|c| c.utterances).collect();
        Corpus::new(name, format, utterances)
    }

    pub fn len(&self) -> usize {
        self.utterances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.utterances.is_empty()
    }

    /// Distinct partitions present, in `dev < test < train < unpartitioned` order.
    pub fn partitions(&self) -> BTreeSet<Partition> {
        self.utterances.iter().map(|u| u.partition).collect()
    }

    pub fn get(&self, id: &str) -> Option<&Utterance> {
        self.utterances.iter().find(|u| u.id == id)
    }
}
