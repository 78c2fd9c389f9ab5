use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use super::ConcordanceLine;
use crate::audit::MatchSet;
use crate::corpus::{strip_punctuation, Corpus};
use crate::lexicon::{Category, GenderClass};

/// Default number of sample lines kept per corpus.
pub const DEFAULT_SAMPLES: usize = 5;
/// Default context window for sample lines, in tokens either side.
pub const DEFAULT_WINDOW: usize = 5;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusFrequency {
    pub corpus: String,
    pub frequency: u64,
}

/// A matched gendered-language term put forward for ambiguity rating.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Candidate {
    /// Most frequent matched word form, used as the AVA term.
    pub term: String,
    /// The dictionary pattern the matches came from.
    pub pattern: String,
    pub source_dictionaries: Vec<String>,
    pub original_gender: GenderClass,
    pub corpora_found: Vec<CorpusFrequency>,
    pub sample_examples: Vec<ConcordanceLine>,
}

impl Candidate {
    pub fn total_frequency(&self) -> u64 {
        self.corpora_found.iter().map(|c| c.frequency).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CandidateOptions {
    pub samples_per_corpus: usize,
    pub window: usize,
}

impl Default for CandidateOptions {
    fn default() -> Self {
        CandidateOptions {
            samples_per_corpus: DEFAULT_SAMPLES,
            window: DEFAULT_WINDOW,
        }
    }
}

#[derive(Default)]
struct Acc {
    per_corpus: BTreeMap<String, u64>,
    sources: Vec<String>,
    genders: BTreeMap<GenderClass, u64>,
    forms: BTreeMap<String, u64>,
    /// Per corpus: snippet text → (count, first line in corpus order).
    lines: BTreeMap<String, Vec<(String, u64, ConcordanceLine)>>,
}

/// One candidate per matched gendered-language pattern, ordered by total
/// frequency (descending) and then term.
///
/// Each match set is paired with the corpus it was produced from, which
/// supplies the sample lines. Matches of other categories are ignored.
/// Samples are the most frequent distinct contexts, first seen first on ties.
pub fn extract_candidates(sets: &[(&MatchSet, &Corpus)], opts: CandidateOptions) -> Vec<Candidate> {
    let mut acc: BTreeMap<String, Acc> = BTreeMap::new();
    for (m, c) in sets {
        let texts: HashMap<&str, Vec<&str>> = c
            .utterances
            .iter()
            .map(|u| (u.id.as_str(), u.text.split_whitespace().collect()))
            .collect();
        let mut order: Vec<&crate::audit::Match> = m
            .matches
            .iter()
            .filter(|x| x.category == Category::GenderedLanguage)
            .collect();
        // corpus order, so that "first seen" means first in the source file
        let position: HashMap<&str, usize> = c
            .utterances
            .iter()
            .enumerate()
            .map(|(i, u)| (u.id.as_str(), i))
            .collect();
        order.sort_by_key(|x| (position.get(x.utterance_id.as_str()).copied(), x.index));

        for x in order {
            let a = acc.entry(x.term.clone()).or_default();
            *a.per_corpus.entry(m.corpus_name.clone()).or_insert(0) += 1;
            if !a.sources.contains(&x.source_id) {
                a.sources.push(x.source_id.clone());
            }
            *a.genders.entry(x.gender).or_insert(0) += 1;
            let norm = strip_punctuation(&x.surface.to_lowercase()).to_string();
            *a.forms.entry(norm).or_insert(0) += 1;
            let Some(raw) = texts.get(x.utterance_id.as_str()) else {
                continue;
            };
            if x.index >= raw.len() {
                continue;
            }
            let lo = x.index.saturating_sub(opts.window);
            let hi = (x.index + 1 + opts.window).min(raw.len());
            let line = ConcordanceLine {
                corpus: m.corpus_name.clone(),
                utterance_id: x.utterance_id.clone(),
                index: x.index,
                left_context: raw[lo..x.index].join(" "),
                keyword: raw[x.index].to_string(),
                right_context: raw[x.index + 1..hi].join(" "),
            };
            let key = line.snippet().to_lowercase();
            let bucket = a.lines.entry(m.corpus_name.clone()).or_default();
            match bucket.iter_mut().find(|(k, _, _)| *k == key) {
                Some(entry) => entry.1 += 1,
                None => bucket.push((key, 1, line)),
            }
        }
    }

    let mut out: Vec<Candidate> = acc
        .into_iter()
        .map(|(pattern, a)| {
            let original_gender = max_by_count(&a.genders).expect("at least one match");
            let term = max_by_count(&a.forms).unwrap_or_else(|| pattern.clone());
            let mut sample_examples = Vec::new();
            for (_, mut lines) in a.lines {
                // stable: equal counts keep first-seen order
                lines.sort_by(|x, y| y.1.cmp(&x.1));
                sample_examples.extend(
                    lines
                        .into_iter()
                        .take(opts.samples_per_corpus)
                        .map(|(_, _, l)| l),
                );
            }
            Candidate {
                term,
                pattern,
                source_dictionaries: a.sources,
                original_gender,
                corpora_found: a
                    .per_corpus
                    .into_iter()
                    .map(|(corpus, frequency)| CorpusFrequency { corpus, frequency })
                    .collect(),
                sample_examples,
            }
        })
        .collect();
    out.sort_by(|a, b| {
        b.total_frequency()
            .cmp(&a.total_frequency())
            .then_with(|| a.term.cmp(&b.term))
    });
    out
}

/// The key with the highest count; the smallest key wins ties.
fn max_by_count<K: Ord + Clone>(m: &BTreeMap<K, u64>) -> Option<K> {
    let mut best: Option<(&K, u64)> = None;
    for (k, v) in m {
        if best.is_none_or(|(_, b)| *v > b) {
            best = Some((k, *v));
        }
    }
    best.map(|(k, _)| k.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::audit::run_audit;
    use crate::corpus::{Partition, Pipeline, PipelineProfile, SourceFormat, StopWords, Utterance};
    use crate::lexicon::{DictEntry, DictMetadata, Dictionary};

    fn corpus(name: &str, texts: &[&str]) -> Corpus {
        Corpus::new(
            name,
            SourceFormat::MassiveJsonl,
            texts
                .iter()
                .enumerate()
                .map(|(i, t)| Utterance {
                    id: format!("{name}-{i}"),
                    partition: Partition::Train,
                    text: t.to_string(),
                    meta: Default::default(),
                })
                .collect(),
        )
        .unwrap()
    }

    fn audit(c: &Corpus) -> MatchSet {
        let d = Dictionary::new(
            "gaucher",
            vec![
                DictEntry::new("warm", GenderClass::Feminine, Category::GenderedLanguage, "gaucher"),
                DictEntry::new("strong", GenderClass::Masculine, Category::GenderedLanguage, "gaucher"),
            ],
            DictMetadata::default(),
        );
        let p = Pipeline::new(PipelineProfile::gendered_language(), StopWords::english());
        run_audit(c, &d, &p, None, &[]).unwrap()
    }

    #[test]
    fn warm_in_both_corpora() {
        let a = corpus("massive", &["is it warm outside"; 17]);
        let b = corpus("redial", &["a warm movie"; 14]);
        let (ma, mb) = (audit(&a), audit(&b));
        let cands = extract_candidates(&[(&ma, &a), (&mb, &b)], CandidateOptions::default());
        assert_eq!(cands.len(), 1);
        let warm = &cands[0];
        assert_eq!(warm.term, "warm");
        assert_eq!(warm.original_gender, GenderClass::Feminine);
        assert_eq!(
            warm.corpora_found,
            [
                CorpusFrequency { corpus: "massive".into(), frequency: 17 },
                CorpusFrequency { corpus: "redial".into(), frequency: 14 },
            ]
        );
        // identical contexts collapse into one sample per corpus
        assert_eq!(warm.sample_examples.len(), 2);
        assert_eq!(warm.sample_examples[0].snippet(), "is it warm outside");
    }

    #[test]
    fn ordering_and_single_corpus() {
        let a = corpus("massive", &["strong coffee", "make a strong coffee", "warm"]);
        let ma = audit(&a);
        let cands = extract_candidates(&[(&ma, &a)], CandidateOptions::default());
        let terms: Vec<&str> = cands.iter().map(|c| c.term.as_str()).collect();
        assert_eq!(terms, ["strong", "warm"]);
        assert_eq!(cands[0].corpora_found.len(), 1);
        assert_eq!(cands[0].source_dictionaries, ["gaucher"]);
    }

    #[test]
    fn samples_capped_and_ranked() {
        let a = corpus("massive", &["so warm", "very warm", "very warm", "warm day", "warm night"]);
        let ma = audit(&a);
        let opts = CandidateOptions { samples_per_corpus: 2, window: 3 };
        let cands = extract_candidates(&[(&ma, &a)], opts);
        let s: Vec<String> = cands[0].sample_examples.iter().map(|l| l.snippet()).collect();
        assert_eq!(s, ["very warm", "so warm"]);
    }

    #[test]
    fn empty() {
        assert!(extract_candidates(&[], CandidateOptions::default()).is_empty());
    }
}
