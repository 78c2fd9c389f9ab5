//! Matching dictionaries against tokenized corpora, and the frequency
//! tables derived from the matches.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, Partition, Pipeline, PipelineProfile, Token};
use crate::error::{Error, Result};
use crate::lexicon::{
    compile_glob, subtract_with, AvaEntry, AvaMode, Category, Dictionary, GenderClass, Matcher,
};

mod tables;

pub use tables::{cross_table, dict_share, frequency_table, top_terms, AuditReport, DictShare, FrequencyRow, TopTerm};

/// One dictionary hit on one token.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Match {
    /// Index of the entry in the audited dictionary.
    pub entry: usize,
    /// The entry's normalized pattern.
    pub term: String,
    pub source_id: String,
    pub gender: GenderClass,
    pub category: Category,
    pub partition: Partition,
    pub utterance_id: String,
    pub index: usize,
    /// The token form the pattern accepted: its stem or its norm.
    pub form: String,
    pub surface: String,
    pub ambiguous: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchSet {
    pub corpus_name: String,
    pub dictionary_name: String,
    pub profile_name: String,
    pub exclusions: Vec<String>,
    /// Sorted by (utterance_id, index, entry).
    pub matches: Vec<Match>,
    /// The dictionary actually matched, after any AVA removal.
    pub dictionary: Dictionary,
    /// Partitions present in the audited corpus.
    pub partitions: BTreeSet<Partition>,
}

/// Agent names excluded by default from name audits.
pub const AGENT_NAMES: [&str; 3] = ["alexa", "siri", "olly"];

/// `AGENT_NAMES` for dictionaries containing names, nothing otherwise.
pub fn default_exclusions(d: &Dictionary) -> Vec<String> {
    if d.categories().contains(&Category::Name) {
        AGENT_NAMES.iter().map(|s| s.to_string()).collect()
    } else {
        Vec::new()
    }
}

/// Checks that `p` tokenizes into the space `category` is matched in.
pub fn check_compatible(category: Category, p: &PipelineProfile) -> Result<()> {
    let problem = match category {
        Category::GenderedLanguage if !p.stem => Some("requires a stemming profile"),
        Category::Pronoun if p.remove_stopwords => {
            Some("requires a profile that keeps stop words (pronouns are stop words)")
        }
        Category::MarkedWord | Category::Name if p.stem => {
            Some("is matched on unstemmed forms and requires a profile without stemming")
        }
        _ => None,
    };
    match problem {
        Some(msg) => Err(Error::Config(format!(
            "{category} dictionary {msg}; profile `{}` is incompatible",
            p.name
        ))),
        None => Ok(()),
    }
}

/// The token form an entry of `category` is matched against.
pub fn matched_form(token: &Token, category: Category) -> &str {
    if category.matches_stems() {
        &token.stem
    } else {
        &token.norm
    }
}

/// Compiled dictionary: literal patterns are hashed per matching space,
/// wildcard patterns are tested one by one.
pub(crate) struct Compiled {
    stem_literals: HashMap<String, Vec<usize>>,
    norm_literals: HashMap<String, Vec<usize>>,
    wild: Vec<(usize, Matcher)>,
    categories: Vec<Category>,
}

impl Compiled {
    pub(crate) fn new(d: &Dictionary) -> Result<Self> {
        let mut c = Compiled {
            stem_literals: HashMap::new(),
            norm_literals: HashMap::new(),
            wild: Vec::new(),
            categories: d.entries().iter().map(|e| e.category).collect(),
        };
        for (i, e) in d.entries().iter().enumerate() {
            let m = compile_glob(&e.pattern)?;
            match m.literal() {
                Some(lit) => {
                    let index = if e.category.matches_stems() {
                        &mut c.stem_literals
                    } else {
                        &mut c.norm_literals
                    };
                    index.entry(lit.to_string()).or_default().push(i);
                }
                None => c.wild.push((i, m)),
            }
        }
        Ok(c)
    }

    /// Entry indices accepting `token`, ascending.
    pub(crate) fn hits(&self, token: &Token) -> Vec<usize> {
        let mut out = Vec::new();
        if let Some(v) = self.stem_literals.get(&token.stem) {
            out.extend(v);
        }
        if let Some(v) = self.norm_literals.get(&token.norm) {
            out.extend(v);
        }
        for (i, m) in &self.wild {
            if m.is_match(matched_form(token, self.categories[*i])) {
                out.push(*i);
            }
        }
        out.sort_unstable();
        out
    }
}

/// Runs every dictionary entry over every token of `c`.
///
/// With `ava` in remove mode the ambiguous entries are dropped before
/// matching; in flag mode they stay and their matches carry
/// `ambiguous = true`. Tokens whose norm is in `exclusions` never match.
pub fn run_audit(
    c: &Corpus,
    d: &Dictionary,
    p: &Pipeline,
    ava: Option<(&[AvaEntry], AvaMode)>,
    exclusions: &[String],
) -> Result<MatchSet> {
    for cat in d.categories() {
        check_compatible(cat, &p.profile)?;
    }
    let dictionary = match ava {
        Some((terms, mode)) => subtract_with(d, terms, mode, &p.stopwords).dictionary,
        None => d.clone(),
    };
    let compiled = Compiled::new(&dictionary)?;
    let excluded: BTreeSet<String> = exclusions.iter().map(|s| s.to_lowercase()).collect();
    let entries = dictionary.entries();

    let mut matches: Vec<Match> = c
        .utterances
        .par_iter()
        .flat_map_iter(|u| {
            let mut found = Vec::new();
            for t in p.tokenize(u) {
                if excluded.contains(&t.norm) {
                    continue;
                }
                for i in compiled.hits(&t) {
                    let e = &entries[i];
                    found.push(Match {
                        entry: i,
                        term: e.pattern.clone(),
                        source_id: e.source_id.clone(),
                        gender: e.gender,
                        category: e.category,
                        partition: u.partition,
                        utterance_id: u.id.clone(),
                        index: t.index,
                        form: matched_form(&t, e.category).to_string(),
                        surface: t.surface.clone(),
                        ambiguous: e.ambiguous,
                    });
                }
            }
            found
        })
        .collect();
    matches.sort_by(|a, b| {
        (&a.utterance_id, a.index, a.entry).cmp(&(&b.utterance_id, b.index, b.entry))
    });

    Ok(MatchSet {
        corpus_name: c.name.clone(),
        dictionary_name: dictionary.name.clone(),
        profile_name: p.profile.name.clone(),
        exclusions: excluded.into_iter().collect(),
        matches,
        dictionary,
        partitions: c.partitions(),
    })
}

#[derive(Serialize)]
struct MatchLine<'a> {
    term: &'a str,
    gender: GenderClass,
    category: Category,
    corpus: &'a str,
    partition: Partition,
    utterance_id: &'a str,
    index: usize,
    ambiguous: bool,
}

impl MatchSet {
    /// One JSON object per match.
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for m in &self.matches {
            let line = MatchLine {
                term: &m.term,
                gender: m.gender,
                category: m.category,
                corpus: &self.corpus_name,
                partition: m.partition,
                utterance_id: &m.utterance_id,
                index: m.index,
                ambiguous: m.ambiguous,
            };
            out.push_str(&serde_json::to_string(&line).expect("matches serialize"));
            out.push('\n');
        }
        out
    }

    /// Match counts per `(term, gender)`.
    pub fn term_counts(&self) -> BTreeMap<(&str, GenderClass), u64> {
        let mut out = BTreeMap::new();
        for m in &self.matches {
            *out.entry((m.term.as_str(), m.gender)).or_insert(0) += 1;
        }
        out
    }
}
