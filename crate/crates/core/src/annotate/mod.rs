//! The AVA workflow: candidate extraction, concordance, multi-rater
//! sessions with an event journal, agreement and export.

mod candidates;
mod concordance;
mod session;

pub use candidates::{
    extract_candidates, Candidate, CandidateOptions, CorpusFrequency, DEFAULT_SAMPLES,
    DEFAULT_WINDOW,
};
pub use concordance::{concordance, ConcordanceLine};
pub use session::{
    event_line, parse_journal, CreatedPayload, Event, RatedPayload, Rating, Resolution,
    ResolvedPayload, Session, TermStatus,
};
