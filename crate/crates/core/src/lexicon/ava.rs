use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::GenderClass;
use crate::error::{Error, Result};

/// The bundled 44-term AVA dictionary.
pub const SHIPPED_AVA: &str = include_str!("../../data/ava.jsonl");

const SHIPPED_TOTAL: usize = 44;
const SHIPPED_MASCULINE: usize = 26;
const SHIPPED_FEMININE: usize = 18;

/// A term that is gendered in general usage but ambiguous in virtual
/// assistant contexts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AvaEntry {
    pub term: String,
    /// Gender assigned by the source dictionary; masculine or feminine only.
    pub original_gender: GenderClass,
    /// Corpus name to one example snippet.
    pub examples: BTreeMap<String, String>,
    pub decided_ambiguous: bool,
    pub rationale: Option<String>,
}

impl AvaEntry {
    pub fn new<'a>(
        term: impl Into<String>,
        original_gender: GenderClass,
        examples: impl IntoIterator<Item = (&'a str, &'a str)>,
    ) -> Self {
        AvaEntry {
            term: term.into(),
            original_gender,
            examples: examples
                .into_iter()
                .map(|(k, v)| (k.to_string(), v.to_string()))
                .collect(),
            decided_ambiguous: true,
            rationale: None,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.term.trim().is_empty() {
            return Err(Error::validation("term", "empty AVA term"));
        }
        if !matches!(
            self.original_gender,
            GenderClass::Masculine | GenderClass::Feminine
        ) {
            return Err(Error::validation(
                "gender",
                format!("AVA term `{}` must be m or f", self.term),
            ));
        }
        if self.examples.is_empty() {
            return Err(Error::validation(
                "examples",
                format!("AVA term `{}` has no example", self.term),
            ));
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct Wire {
    term: String,
    gender: String,
    examples: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    rationale: Option<String>,
}

/// Parses AVA JSONL: `{"term", "gender": "m"|"f", "examples": {corpus: snippet}}`.
pub fn parse_ava(text: &str) -> Result<Vec<AvaEntry>> {
    let mut out = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let wire: Wire =
            serde_json::from_str(line).map_err(|e| Error::parse(idx + 1, e.to_string()))?;
        let entry = AvaEntry {
            term: wire.term,
            original_gender: GenderClass::from_code(&wire.gender)?,
            examples: wire.examples,
            decided_ambiguous: true,
            rationale: wire.rationale,
        };
        entry.validate()?;
        out.push(entry);
    }
    Ok(out)
}

/// Serializes entries as AVA JSONL in the order given.
pub fn write_ava(entries: &[AvaEntry]) -> Result<String> {
    let mut out = String::new();
    for e in entries {
        e.validate()?;
        let wire = Wire {
            term: e.term.clone(),
            gender: e.original_gender.code().to_string(),
            examples: e.examples.clone(),
            rationale: e.rationale.clone(),
        };
        out.push_str(&serde_json::to_string(&wire).expect("AVA entries serialize"));
        out.push('\n');
    }
    Ok(out)
}

/// Loads the bundled AVA file and checks its 44 / 26 m / 18 f shape.
pub fn shipped_ava() -> Result<Vec<AvaEntry>> {
    let entries = parse_ava(SHIPPED_AVA)?;
    let masc = entries
        .iter()
        .filter(|e| e.original_gender == GenderClass::Masculine)
        .count();
    let fem = entries.len() - masc;
    if entries.len() != SHIPPED_TOTAL || masc != SHIPPED_MASCULINE || fem != SHIPPED_FEMININE {
        return Err(Error::validation(
            "ava",
            format!(
                "bundled AVA has {} terms ({masc} m / {fem} f), expected {SHIPPED_TOTAL} ({SHIPPED_MASCULINE} m / {SHIPPED_FEMININE} f)",
                entries.len()
            ),
        ));
    }
    Ok(entries)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn shipped_shape() {
        let entries = shipped_ava().unwrap();
        assert_eq!(entries.len(), 44);
        let terms: HashSet<&str> = entries.iter().map(|e| e.term.as_str()).collect();
        assert_eq!(terms.len(), 44);
        for t in ["love", "power", "connection", "kind", "quiet", "strong", "soft", "warm"] {
            assert!(terms.contains(t), "{t}");
        }
        let love = entries.iter().find(|e| e.term == "love").unwrap();
        assert_eq!(love.original_gender, GenderClass::Feminine);
        assert_eq!(love.examples["redial"], "I love action movies");
    }

    #[test]
    fn round_trip() {
        let text = write_ava(&parse_ava(SHIPPED_AVA).unwrap()).unwrap();
        assert_eq!(text, SHIPPED_AVA);
    }

    #[test]
    fn rejects_neutral_gender() {
        let line = r#"{"term":"x","gender":"n","examples":{"massive":"x"}}"#;
        assert!(parse_ava(line).is_err());
    }

    #[test]
    fn rejects_missing_examples() {
        let line = r#"{"term":"x","gender":"m","examples":{}}"#;
        assert!(parse_ava(line).is_err());
    }
}
