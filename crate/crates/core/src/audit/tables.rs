use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::MatchSet;
use crate::corpus::Partition;
use crate::error::{Error, Result};
use crate::lexicon::{Dictionary, GenderClass};

/// How many dictionary entries occur at least once.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DictShare {
    pub matched_terms: usize,
    pub total_terms: usize,
    /// `None` for an empty dictionary.
    pub fraction: Option<f64>,
}

/// Frequencies for one partition, or the overall row when `partition` is `None`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrequencyRow {
    pub partition: Option<Partition>,
    pub frequencies: BTreeMap<GenderClass, u64>,
    /// Frequency over the row total; `None` when the row is empty.
    pub ratios: BTreeMap<GenderClass, Option<f64>>,
    pub total: u64,
}

impl FrequencyRow {
    fn new(partition: Option<Partition>, genders: &[GenderClass]) -> Self {
        FrequencyRow {
            partition,
            frequencies: genders.iter().map(|g| (*g, 0)).collect(),
            ratios: BTreeMap::new(),
            total: 0,
        }
    }

    fn finish(&mut self) {
        self.total = self.frequencies.values().sum();
        self.ratios = self
            .frequencies
            .iter()
            .map(|(g, f)| {
                let r = (self.total > 0).then(|| *f as f64 / self.total as f64);
                (*g, r)
            })
            .collect();
    }

    pub fn label(&self) -> &'static str {
        self.partition.map_or("overall", Partition::as_str)
    }

    pub fn frequency(&self, g: GenderClass) -> u64 {
        self.frequencies.get(&g).copied().unwrap_or(0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub corpus_name: String,
    pub dictionary_name: String,
    pub profile_name: String,
    pub dict_share: DictShare,
    /// Column order for every row.
    pub genders: Vec<GenderClass>,
    /// One row per partition in the corpus, then the overall row. Empty for
    /// an empty corpus.
    pub rows: Vec<FrequencyRow>,
    pub total_instances: u64,
}

impl AuditReport {
    pub fn overall(&self) -> Option<&FrequencyRow> {
        self.rows.iter().find(|r| r.partition.is_none())
    }

    /// Checks the partition-sum and total invariants.
    pub fn check(&self) -> Result<()> {
        let Some(overall) = self.overall() else {
            return if self.total_instances == 0 {
                Ok(())
            } else {
                Err(Error::validation("rows", "missing overall row"))
            };
        };
        for g in &self.genders {
            let sum: u64 = self
                .rows
                .iter()
                .filter(|r| r.partition.is_some())
                .map(|r| r.frequency(*g))
                .sum();
            if sum != overall.frequency(*g) {
                return Err(Error::validation(
                    "rows",
                    format!("{g}: partitions sum to {sum}, overall is {}", overall.frequency(*g)),
                ));
            }
        }
        if overall.total != self.total_instances {
            return Err(Error::validation("total_instances", "does not match overall row"));
        }
        Ok(())
    }
}

/// Share of `d`'s entries with at least one match in `m`.
pub fn dict_share(m: &MatchSet, d: &Dictionary) -> Result<DictShare> {
    if m.dictionary_name != d.name {
        return Err(Error::validation(
            "dictionary",
            format!(
                "matches come from `{}`, not `{}`",
                m.dictionary_name, d.name
            ),
        ));
    }
    Ok(share(m, d))
}

fn share(m: &MatchSet, d: &Dictionary) -> DictShare {
    let matched: BTreeSet<(&str, GenderClass)> =
        m.matches.iter().map(|x| (x.term.as_str(), x.gender)).collect();
    let matched_terms = d
        .entries()
        .iter()
        .filter(|e| matched.contains(&(e.pattern.as_str(), e.gender)))
        .count();
    let total_terms = d.len();
    DictShare {
        matched_terms,
        total_terms,
        fraction: (total_terms > 0).then(|| matched_terms as f64 / total_terms as f64),
    }
}

/// Per-partition and overall frequencies with row ratios.
pub fn frequency_table(m: &MatchSet) -> AuditReport {
    let mut genders: BTreeSet<GenderClass> = m.dictionary.genders().into_iter().collect();
    genders.extend(m.matches.iter().map(|x| x.gender));
    let genders: Vec<GenderClass> = genders.into_iter().collect();

    let mut rows: Vec<FrequencyRow> = Vec::new();
    if !m.partitions.is_empty() {
        let mut by_partition: BTreeMap<Partition, FrequencyRow> = m
            .partitions
            .iter()
            .map(|p| (*p, FrequencyRow::new(Some(*p), &genders)))
            .collect();
        let mut overall = FrequencyRow::new(None, &genders);
        for x in &m.matches {
            let row = by_partition
                .entry(x.partition)
                .or_insert_with(|| FrequencyRow::new(Some(x.partition), &genders));
            *row.frequencies.entry(x.gender).or_insert(0) += 1;
            *overall.frequencies.entry(x.gender).or_insert(0) += 1;
        }
        rows.extend(by_partition.into_values());
        rows.push(overall);
        for r in &mut rows {
            r.finish();
        }
    }
    let total_instances = rows.last().map_or(0, |r| r.total);
    AuditReport {
        corpus_name: m.corpus_name.clone(),
        dictionary_name: m.dictionary_name.clone(),
        profile_name: m.profile_name.clone(),
        dict_share: share(m, &m.dictionary),
        genders,
        rows,
        total_instances,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TopTerm {
    pub term: String,
    pub gender: GenderClass,
    pub frequency: u64,
}

/// The `k` most frequent `(term, gender)` pairs; ties go to the
/// lexicographically smaller term.
pub fn top_terms(m: &MatchSet, k: usize) -> Vec<TopTerm> {
    let mut all: Vec<TopTerm> = m
        .term_counts()
        .into_iter()
        .map(|((term, gender), frequency)| TopTerm {
            term: term.to_string(),
            gender,
            frequency,
        })
        .collect();
    all.sort_by(|a, b| {
        b.frequency
            .cmp(&a.frequency)
            .then_with(|| a.term.cmp(&b.term))
            .then_with(|| a.gender.cmp(&b.gender))
    });
    all.truncate(k);
    all
}

/// Overall frequencies of two genders in two reports, one report per row.
pub fn cross_table(
    a: &AuditReport,
    b: &AuditReport,
    genders: [GenderClass; 2],
) -> Result<[[u64; 2]; 2]> {
    let row = |r: &AuditReport| -> Result<[u64; 2]> {
        for g in genders {
            if !r.genders.contains(&g) {
                return Err(Error::validation(
                    "gender",
                    format!("report `{}` has no {g} column", r.corpus_name),
                ));
            }
        }
        let overall = r.overall();
        let cells = genders.map(|g| overall.map_or(0, |o| o.frequency(g)));
        if cells.iter().sum::<u64>() == 0 {
            return Err(Error::validation(
                "report",
                format!("report `{}` has no {} or {} instances", r.corpus_name, genders[0], genders[1]),
            ));
        }
        Ok(cells)
    };
    Ok([row(a)?, row(b)?])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::audit::Match;
    use crate::lexicon::{Category, DictEntry, DictMetadata};
    use GenderClass::{Feminine as F, Masculine as M};

    fn m(term: &str, g: GenderClass, p: Partition, id: usize) -> Match {
        Match {
            entry: 0,
            term: term.into(),
            source_id: "s".into(),
            gender: g,
            category: Category::GenderedLanguage,
            partition: p,
            utterance_id: id.to_string(),
            index: 0,
            form: term.into(),
            surface: term.into(),
            ambiguous: false,
        }
    }

    fn set(matches: Vec<Match>) -> MatchSet {
        let d = Dictionary::new(
            "d",
            vec![
                DictEntry::new("strong", M, Category::GenderedLanguage, "s"),
                DictEntry::new("warm", F, Category::GenderedLanguage, "s"),
                DictEntry::new("lead", M, Category::GenderedLanguage, "s"),
            ],
            DictMetadata::default(),
        );
        MatchSet {
            corpus_name: "c".into(),
            dictionary_name: d.name.clone(),
            profile_name: "gendered_language".into(),
            exclusions: vec![],
            matches,
            dictionary: d,
            partitions: [Partition::Dev, Partition::Test, Partition::Train].into(),
        }
    }

    fn counts(spec: &[(GenderClass, Partition, usize)]) -> Vec<Match> {
        let mut out = Vec::new();
        let mut id = 0;
        for (g, p, n) in spec {
            let term = if *g == M { "strong" } else { "warm" };
            for _ in 0..*n {
                out.push(m(term, *g, *p, id));
                id += 1;
            }
        }
        out
    }

    #[test]
    fn partition_sum_and_ratios() {
        let ms = set(counts(&[
            (M, Partition::Dev, 15),
            (M, Partition::Test, 14),
            (M, Partition::Train, 64),
            (F, Partition::Dev, 10),
            (F, Partition::Test, 9),
            (F, Partition::Train, 60),
        ]));
        let r = frequency_table(&ms);
        r.check().unwrap();
        let o = r.overall().unwrap();
        assert_eq!(o.frequency(M), 93);
        assert_eq!(o.frequency(F), 79);
        assert_eq!(r.total_instances, 172);
        assert_eq!(format!("{:.3}", o.ratios[&M].unwrap()), "0.541");
        assert_eq!(format!("{:.3}", o.ratios[&F].unwrap()), "0.459");
        assert_eq!(r.rows.len(), 4);
        assert_eq!(r.dict_share.matched_terms, 2);
        assert_eq!(r.dict_share.total_terms, 3);
    }

    #[test]
    fn empty_matchset() {
        let r = frequency_table(&set(vec![]));
        r.check().unwrap();
        assert_eq!(r.total_instances, 0);
        assert!(r.rows.iter().all(|row| row.ratios.values().all(Option::is_none)));
        assert_eq!(r.dict_share.fraction, Some(0.0));
    }

    #[test]
    fn share_requires_matching_dictionary() {
        let ms = set(vec![]);
        assert!(dict_share(&ms, &ms.dictionary).is_ok());
        assert!(dict_share(&ms, &Dictionary::empty("other")).is_err());
    }

    #[test]
    fn top_terms_ordering() {
        let mut ms = counts(&[(M, Partition::Train, 3), (F, Partition::Train, 3)]);
        ms.push(m("lead", M, Partition::Dev, 99));
        let ms = set(ms);
        let top = top_terms(&ms, 10);
        let names: Vec<&str> = top.iter().map(|t| t.term.as_str()).collect();
        assert_eq!(names, ["strong", "warm", "lead"]);
        assert!(top_terms(&ms, 0).is_empty());
    }

    #[test]
    fn cross_table_cells() {
        let a = frequency_table(&set(counts(&[(M, Partition::Train, 54), (F, Partition::Train, 12)])));
        let b = frequency_table(&set(counts(&[(M, Partition::Test, 1344), (F, Partition::Test, 1128)])));
        assert_eq!(cross_table(&a, &b, [M, F]).unwrap(), [[54, 12], [1344, 1128]]);
        let empty = frequency_table(&set(vec![]));
        assert!(cross_table(&a, &empty, [M, F]).is_err());
        assert!(cross_table(&a, &b, [M, GenderClass::Neo]).is_err());
    }
}
