use serde::{Deserialize, Serialize};

use crate::audit::{check_compatible, matched_form};
use crate::corpus::{Corpus, Pipeline};
use crate::error::{Error, Result};
use crate::lexicon::{compile_glob, normalize_pattern, Category};

/// A keyword-in-context line.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ConcordanceLine {
    pub corpus: String,
    pub utterance_id: String,
    /// Position of the keyword among the utterance's whitespace tokens.
    pub index: usize,
    pub left_context: String,
    pub keyword: String,
    pub right_context: String,
}

impl ConcordanceLine {
    /// Left context, keyword and right context joined by single spaces.
    pub fn snippet(&self) -> String {
        [&self.left_context, &self.keyword, &self.right_context]
            .iter()
            .filter(|s| !s.is_empty())
            .map(|s| s.as_str())
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// Every token of `c` matched by `pattern` under the same rules an audit with
/// `p` and a `category` dictionary would use, in corpus order. Context is up
/// to `window` raw whitespace tokens either side.
pub fn concordance(
    c: &Corpus,
    pattern: &str,
    window: usize,
    p: &Pipeline,
    category: Category,
) -> Result<Vec<ConcordanceLine>> {
    if window == 0 {
        return Err(Error::validation("window", "must be at least 1"));
    }
    check_compatible(category, &p.profile)?;
    let Some(norm) = normalize_pattern(pattern, category, &p.stopwords) else {
        return Ok(Vec::new());
    };
    let matcher = compile_glob(&norm)?;
    let mut out = Vec::new();
    for u in &c.utterances {
        let tokens = p.tokenize(u);
        if !tokens.iter().any(|t| matcher.is_match(matched_form(t, category))) {
            continue;
        }
        let raw: Vec<&str> = u.text.split_whitespace().collect();
        for t in tokens {
            if !matcher.is_match(matched_form(&t, category)) {
                continue;
            }
            let lo = t.index.saturating_sub(window);
            let hi = (t.index + 1 + window).min(raw.len());
            out.push(ConcordanceLine {
                corpus: c.name.clone(),
                utterance_id: u.id.clone(),
                index: t.index,
                left_context: raw[lo..t.index].join(" "),
                keyword: raw[t.index].to_string(),
                right_context: raw[t.index + 1..hi].join(" "),
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{Partition, PipelineProfile, SourceFormat, StopWords, Utterance};

    fn corpus(texts: &[&str]) -> Corpus {
        Corpus::new(
            "massive",
            SourceFormat::MassiveJsonl,
            texts
                .iter()
                .enumerate()
                .map(|(i, t)| Utterance {
                    id: i.to_string(),
                    partition: Partition::Train,
                    text: t.to_string(),
                    meta: Default::default(),
                })
                .collect(),
        )
        .unwrap()
    }

    fn gl() -> Pipeline {
        Pipeline::new(PipelineProfile::gendered_language(), StopWords::english())
    }

    #[test]
    fn warm_outside() {
        let c = corpus(&["is it warm outside"]);
        let lines = concordance(&c, "warm", 3, &gl(), Category::GenderedLanguage).unwrap();
        assert_eq!(lines.len(), 1);
        assert_eq!(lines[0].left_context, "is it");
        assert_eq!(lines[0].keyword, "warm");
        assert_eq!(lines[0].right_context, "outside");
        assert_eq!(lines[0].snippet(), "is it warm outside");
    }

    #[test]
    fn window_bounds_context() {
        let c = corpus(&["please tell me what kind of music is playing now"]);
        let lines = concordance(&c, "kind", 2, &gl(), Category::GenderedLanguage).unwrap();
        assert_eq!(lines[0].snippet(), "me what kind of music");
    }

    #[test]
    fn absent_and_bad_window() {
        let c = corpus(&["nothing here"]);
        assert!(concordance(&c, "warm", 3, &gl(), Category::GenderedLanguage)
            .unwrap()
            .is_empty());
        assert!(concordance(&c, "warm", 0, &gl(), Category::GenderedLanguage).is_err());
    }

    #[test]
    fn stem_space_matching() {
        let c = corpus(&["I loved it", "Love, actually!", "lovely"]);
        let lines = concordance(&c, "love", 1, &gl(), Category::GenderedLanguage).unwrap();
        let kw: Vec<&str> = lines.iter().map(|l| l.keyword.as_str()).collect();
        assert_eq!(kw, ["loved", "Love,", "lovely"]);
    }
}
