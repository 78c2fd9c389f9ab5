//! Dictionary-based auditing of implicit gendered and masculine-as-norm
//! language in conversational NLP corpora.
//!
//! The crate is organised as a pipeline:
//!
//! * [`corpus`] parses MASSIVE and ReDial dumps into partitioned utterances
//!   and tokenizes them under named [`corpus::PipelineProfile`]s.
//! * [`lexicon`] loads gendered dictionaries, compiles glob patterns and
//!   applies score thresholds and ambiguity (AVA) lists.
//! * [`audit`] matches dictionaries against tokenized corpora and derives
//!   shares, per-partition frequencies, ratios and top-term rankings.
//! * [`stats`] provides chi-square tests and Krippendorff's alpha.
//! * [`annotate`] drives the multi-rater workflow that produces AVA files.
//! * [`report`] renders everything as markdown, CSV or JSON tables.

pub mod annotate;
pub mod audit;
pub mod corpus;
mod error;
pub mod lexicon;
pub mod report;
pub mod stats;

pub use error::{Error, Result};

pub use annotate::{Candidate, ConcordanceLine, Session, TermStatus};
pub use audit::{AuditReport, Match, MatchSet};
pub use corpus::{Corpus, Partition, Pipeline, PipelineProfile, StopWords, Token, Utterance};
pub use lexicon::{AvaEntry, AvaMode, Category, DictEntry, Dictionary, GenderClass, Matcher};
pub use stats::{Chi2Result, RatingsMatrix};
