use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::Candidate;
use crate::error::{Error, Result};
use crate::lexicon::{write_ava, AvaEntry};
use crate::stats::{kripp_alpha, RatingsMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TermStatus {
    Pending,
    Agreed,
    NeedsDiscussion,
    Resolved,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rating {
    pub ambiguous: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub example_ref: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Resolution {
    pub decision: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

/// A journal record. `timestamp` is milliseconds since the Unix epoch.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Event {
    Created {
        timestamp: u64,
        payload: CreatedPayload,
    },
    Rated {
        timestamp: u64,
        payload: RatedPayload,
    },
    Resolved {
        timestamp: u64,
        payload: ResolvedPayload,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CreatedPayload {
    pub id: String,
    pub raters: Vec<String>,
    pub candidates: Vec<Candidate>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatedPayload {
    pub rater: String,
    pub term: String,
    #[serde(flatten)]
    pub rating: Rating,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResolvedPayload {
    pub term: String,
    #[serde(flatten)]
    pub resolution: Resolution,
}

/// A multi-rater ambiguity rating session, rebuilt from its event journal.
///
/// A term is pending until every rater has rated it, then agreed if all
/// ratings match and needs_discussion otherwise. Only an explicit
/// resolution makes it resolved, after which it accepts no more events.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Session {
    pub id: String,
    pub raters: Vec<String>,
    pub candidates: Vec<Candidate>,
    /// term → rater → latest rating
    pub ratings: BTreeMap<String, BTreeMap<String, Rating>>,
    pub term_status: BTreeMap<String, TermStatus>,
    pub resolutions: BTreeMap<String, Resolution>,
    #[serde(skip)]
    journal: Vec<Event>,
}

impl Session {
    pub fn create(
        id: impl Into<String>,
        candidates: Vec<Candidate>,
        raters: Vec<String>,
        timestamp: u64,
    ) -> Result<Self> {
        let payload = CreatedPayload {
            id: id.into(),
            raters,
            candidates,
        };
        Self::from_created(&payload)?;
        Self::replay(&[Event::Created { timestamp, payload }])
    }

    fn from_created(p: &CreatedPayload) -> Result<Self> {
        if p.id.trim().is_empty() {
            return Err(Error::validation("id", "empty session id"));
        }
        if p.raters.is_empty() {
            return Err(Error::validation("raters", "at least one rater is required"));
        }
        let mut raters = p.raters.clone();
        raters.sort();
        raters.dedup();
        if raters.len() != p.raters.len() || raters.iter().any(|r| r.trim().is_empty()) {
            return Err(Error::validation("raters", "rater ids must be non-empty and unique"));
        }
        let mut term_status = BTreeMap::new();
        for c in &p.candidates {
            if term_status.insert(c.term.clone(), TermStatus::Pending).is_some() {
                return Err(Error::validation(
                    "candidates",
                    format!("duplicate term `{}`", c.term),
                ));
            }
        }
        Ok(Session {
            id: p.id.clone(),
            raters: p.raters.clone(),
            candidates: p.candidates.clone(),
            ratings: BTreeMap::new(),
            term_status,
            resolutions: BTreeMap::new(),
            journal: Vec::new(),
        })
    }

    /// Rebuilds a session from its journal; the first event must be `created`.
    pub fn replay(events: &[Event]) -> Result<Self> {
        let Some(Event::Created { payload, .. }) = events.first() else {
            return Err(Error::validation("journal", "journal must start with a created event"));
        };
        let mut s = Self::from_created(payload)?;
        s.journal.push(events[0].clone());
        for e in &events[1..] {
            s.apply(e.clone())?;
        }
        Ok(s)
    }

    fn apply(&mut self, e: Event) -> Result<()> {
        match &e {
            Event::Created { .. } => {
                return Err(Error::Conflict(format!("session `{}` already exists", self.id)))
            }
            Event::Rated { payload, .. } => {
                self.check_rater(&payload.rater)?;
                let status = self.status(&payload.term)?;
                if status == TermStatus::Resolved {
                    return Err(Error::Conflict(format!(
                        "term `{}` is already resolved",
                        payload.term
                    )));
                }
                self.ratings
                    .entry(payload.term.clone())
                    .or_default()
                    .insert(payload.rater.clone(), payload.rating.clone());
                let status = self.rated_status(&payload.term);
                self.term_status.insert(payload.term.clone(), status);
            }
            Event::Resolved { payload, .. } => {
                match self.status(&payload.term)? {
                    TermStatus::Agreed | TermStatus::NeedsDiscussion => {}
                    TermStatus::Pending => {
                        return Err(Error::Conflict(format!(
                            "term `{}` has not been rated by every rater",
                            payload.term
                        )))
                    }
                    TermStatus::Resolved => {
                        return Err(Error::Conflict(format!(
                            "term `{}` is already resolved",
                            payload.term
                        )))
                    }
                }
                self.resolutions
                    .insert(payload.term.clone(), payload.resolution.clone());
                self.term_status
                    .insert(payload.term.clone(), TermStatus::Resolved);
            }
        }
        self.journal.push(e);
        Ok(())
    }

    fn check_rater(&self, rater: &str) -> Result<()> {
        if self.raters.iter().any(|r| r == rater) {
            Ok(())
        } else {
            Err(Error::validation("rater", format!("unknown rater `{rater}`")))
        }
    }

    pub fn status(&self, term: &str) -> Result<TermStatus> {
        self.term_status
            .get(term)
            .copied()
            .ok_or_else(|| Error::NotFound {
                kind: "term",
                name: term.to_string(),
            })
    }

    fn rated_status(&self, term: &str) -> TermStatus {
        let Some(r) = self.ratings.get(term) else {
            return TermStatus::Pending;
        };
        if r.len() < self.raters.len() {
            return TermStatus::Pending;
        }
        let mut values = r.values().map(|x| x.ambiguous);
        let first = values.next();
        if values.all(|v| Some(v) == first) {
            TermStatus::Agreed
        } else {
            TermStatus::NeedsDiscussion
        }
    }

    pub fn submit_rating(
        &mut self,
        rater: &str,
        term: &str,
        rating: Rating,
        timestamp: u64,
    ) -> Result<TermStatus> {
        self.apply(Event::Rated {
            timestamp,
            payload: RatedPayload {
                rater: rater.to_string(),
                term: term.to_string(),
                rating,
            },
        })?;
        self.status(term)
    }

    pub fn resolve(
        &mut self,
        term: &str,
        decision: bool,
        note: Option<String>,
        timestamp: u64,
    ) -> Result<TermStatus> {
        self.apply(Event::Resolved {
            timestamp,
            payload: ResolvedPayload {
                term: term.to_string(),
                resolution: Resolution { decision, note },
            },
        })?;
        self.status(term)
    }

    pub fn journal(&self) -> &[Event] {
        &self.journal
    }

    /// The journal as JSONL, one event per line.
    pub fn journal_jsonl(&self) -> String {
        let mut out = String::new();
        for e in &self.journal {
            out.push_str(&event_line(e));
        }
        out
    }

    /// The first candidate, in session order, that `rater` has not rated
    /// and that is not yet resolved.
    pub fn next_for(&self, rater: &str) -> Result<Option<&Candidate>> {
        self.check_rater(rater)?;
        Ok(self.candidates.iter().find(|c| {
            self.term_status.get(&c.term) != Some(&TermStatus::Resolved)
                && !self
                    .ratings
                    .get(&c.term)
                    .is_some_and(|r| r.contains_key(rater))
        }))
    }

    /// Binary ambiguity ratings as an items × raters matrix.
    pub fn ratings_matrix(&self) -> RatingsMatrix {
        let mut m = RatingsMatrix::new();
        for r in &self.raters {
            for c in &self.candidates {
                if let Some(v) = self.ratings.get(&c.term).and_then(|x| x.get(r)) {
                    m.set(&c.term, r, if v.ambiguous { "true" } else { "false" });
                }
            }
        }
        m
    }

    /// Krippendorff's alpha over all rated terms.
    pub fn session_alpha(&self) -> Result<f64> {
        kripp_alpha(&self.ratings_matrix())
    }

    /// Alpha of each term with at least two ratings.
    pub fn term_alpha(&self) -> BTreeMap<String, f64> {
        let m = self.ratings_matrix();
        let mut out = BTreeMap::new();
        for c in &self.candidates {
            if let Ok(a) = kripp_alpha(&m.only_item(&c.term)) {
                out.insert(c.term.clone(), a);
            }
        }
        out
    }

    /// Terms the session decided are ambiguous: agreed with every rating
    /// `true`, or resolved with decision `true`.
    pub fn ambiguous_terms(&self) -> Vec<&Candidate> {
        let mut out: Vec<&Candidate> = self
            .candidates
            .iter()
            .filter(|c| match self.term_status.get(&c.term) {
                Some(TermStatus::Agreed) => self
                    .ratings
                    .get(&c.term)
                    .is_some_and(|r| r.values().all(|x| x.ambiguous)),
                Some(TermStatus::Resolved) => {
                    self.resolutions.get(&c.term).is_some_and(|r| r.decision)
                }
                _ => false,
            })
            .collect();
        out.sort_by(|a, b| a.term.cmp(&b.term));
        out
    }

    /// AVA JSONL for [`Self::ambiguous_terms`], sorted by term, with one
    /// example per corpus the term was found in.
    pub fn export_ava(&self) -> Result<String> {
        let mut entries = Vec::new();
        for c in self.ambiguous_terms() {
            let mut examples = BTreeMap::new();
            for line in &c.sample_examples {
                examples
                    .entry(line.corpus.clone())
                    .or_insert_with(|| line.snippet());
            }
            if examples.is_empty() {
                return Err(Error::validation(
                    "examples",
                    format!("term `{}` has no example", c.term),
                ));
            }
            entries.push(AvaEntry {
                term: c.term.clone(),
                original_gender: c.original_gender,
                examples,
                decided_ambiguous: true,
                rationale: self.resolutions.get(&c.term).and_then(|r| r.note.clone()),
            });
        }
        write_ava(&entries)
    }
}

pub fn event_line(e: &Event) -> String {
    let mut s = serde_json::to_string(e).expect("events serialize");
    s.push('\n');
    s
}

/// Parses a JSONL journal.
pub fn parse_journal(text: &str) -> Result<Vec<Event>> {
    let mut out = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        out.push(serde_json::from_str(line).map_err(|e| Error::parse(idx + 1, e.to_string()))?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::annotate::{ConcordanceLine, CorpusFrequency};
    use crate::lexicon::{parse_ava, GenderClass};

    fn cand(term: &str, g: GenderClass, example: &str) -> Candidate {
        Candidate {
            term: term.into(),
            pattern: term.into(),
            source_dictionaries: vec!["gaucher".into()],
            original_gender: g,
            corpora_found: vec![CorpusFrequency {
                corpus: "redial".into(),
                frequency: 1,
            }],
            sample_examples: vec![ConcordanceLine {
                corpus: "redial".into(),
                utterance_id: "1".into(),
                index: 1,
                left_context: String::new(),
                keyword: example.into(),
                right_context: String::new(),
            }],
        }
    }

    fn rate(a: bool) -> Rating {
        Rating {
            ambiguous: a,
            note: None,
            example_ref: None,
        }
    }

    fn session() -> Session {
        Session::create(
            "s1",
            vec![
                cand("love", GenderClass::Feminine, "I love action movies"),
                cand("strong", GenderClass::Masculine, "make a strong coffee"),
            ],
            vec!["r1".into(), "r2".into(), "r3".into()],
            0,
        )
        .unwrap()
    }

    #[test]
    fn unanimous_agreement() {
        let mut s = session();
        for r in ["r1", "r2"] {
            assert_eq!(s.submit_rating(r, "love", rate(true), 1).unwrap(), TermStatus::Pending);
        }
        assert_eq!(s.submit_rating("r3", "love", rate(true), 1).unwrap(), TermStatus::Agreed);
        assert_eq!(s.session_alpha().unwrap(), 1.0);
    }

    #[test]
    fn split_then_resolve() {
        let mut s = session();
        s.submit_rating("r1", "strong", rate(true), 1).unwrap();
        s.submit_rating("r2", "strong", rate(true), 2).unwrap();
        let st = s.submit_rating("r3", "strong", rate(false), 3).unwrap();
        assert_eq!(st, TermStatus::NeedsDiscussion);
        assert_eq!(s.resolve("strong", true, None, 4).unwrap(), TermStatus::Resolved);
        assert!(matches!(s.resolve("strong", true, None, 5), Err(Error::Conflict(_))));
        assert!(matches!(
            s.submit_rating("r1", "strong", rate(false), 6),
            Err(Error::Conflict(_))
        ));
    }

    #[test]
    fn rerating_moves_between_agreed_and_discussion() {
        let mut s = session();
        for r in ["r1", "r2", "r3"] {
            s.submit_rating(r, "love", rate(true), 1).unwrap();
        }
        assert_eq!(s.submit_rating("r2", "love", rate(false), 2).unwrap(), TermStatus::NeedsDiscussion);
        assert_eq!(s.submit_rating("r2", "love", rate(true), 3).unwrap(), TermStatus::Agreed);
        // history kept in the journal
        assert_eq!(s.journal().len(), 6);
    }

    #[test]
    fn errors() {
        let mut s = session();
        assert!(matches!(
            s.submit_rating("r9", "love", rate(true), 1),
            Err(Error::Validation { .. })
        ));
        assert!(matches!(
            s.submit_rating("r1", "unknown", rate(true), 1),
            Err(Error::NotFound { .. })
        ));
        assert!(matches!(s.resolve("love", true, None, 1), Err(Error::Conflict(_))));
        assert!(Session::create("s", vec![], vec![], 0).is_err());
        assert!(Session::create("s", vec![], vec!["a".into(), "a".into()], 0).is_err());
    }

    #[test]
    fn two_rater_disagreement_alpha() {
        let mut s = Session::create(
            "s",
            vec![cand("love", GenderClass::Feminine, "x"), cand("warm", GenderClass::Feminine, "y")],
            vec!["a".into(), "b".into()],
            0,
        )
        .unwrap();
        for t in ["love", "warm"] {
            s.submit_rating("a", t, rate(true), 1).unwrap();
            s.submit_rating("b", t, rate(false), 1).unwrap();
        }
        assert!((s.session_alpha().unwrap() + 0.5).abs() < 1e-12);
        assert_eq!(s.session_alpha().unwrap(), kripp_alpha(&s.ratings_matrix()).unwrap());
    }

    #[test]
    fn next_term_queue() {
        let mut s = session();
        assert_eq!(s.next_for("r1").unwrap().unwrap().term, "love");
        s.submit_rating("r1", "love", rate(true), 1).unwrap();
        assert_eq!(s.next_for("r1").unwrap().unwrap().term, "strong");
        assert_eq!(s.next_for("r2").unwrap().unwrap().term, "love");
        s.submit_rating("r1", "strong", rate(true), 1).unwrap();
        assert!(s.next_for("r1").unwrap().is_none());
        assert!(s.next_for("nobody").is_err());
    }

    #[test]
    fn export_and_replay() {
        let mut s = session();
        for r in ["r1", "r2", "r3"] {
            s.submit_rating(r, "love", rate(true), 1).unwrap();
        }
        let ava = s.export_ava().unwrap();
        assert_eq!(
            ava,
            "{\"term\":\"love\",\"gender\":\"f\",\"examples\":{\"redial\":\"I love action movies\"}}\n"
        );
        assert_eq!(write_ava(&parse_ava(&ava).unwrap()).unwrap(), ava);

        let replayed = Session::replay(&parse_journal(&s.journal_jsonl()).unwrap()).unwrap();
        assert_eq!(replayed, s);
        assert_eq!(replayed.journal_jsonl(), s.journal_jsonl());
    }

    #[test]
    fn empty_export() {
        assert_eq!(session().export_ava().unwrap(), "");
    }

    #[test]
    fn journal_shape() {
        let mut s = session();
        s.submit_rating("r1", "love", rate(true), 42).unwrap();
        let line = event_line(&s.journal()[1]);
        let v: serde_json::Value = serde_json::from_str(&line).unwrap();
        assert_eq!(v["type"], "rated");
        assert_eq!(v["timestamp"], 42);
        assert_eq!(v["payload"]["rater"], "r1");
        assert_eq!(v["payload"]["ambiguous"], true);
    }
}
