use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde::Deserialize;
use serde_json::Value;

use super::{
    parse_ava, validate_pattern, Category, DictEntry, DictMetadata, Dictionary, GenderClass,
    ScoredList, ScoredWord,
};
use crate::corpus::StopWords;
use crate::error::{Error, Result};

/// On-disk dictionary formats.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DictFormat {
    /// `#masculine` / `#feminine` sections, one term per line (gendered language).
    CategoricalList,
    /// `word,score` CSV with scores in [1, 7].
    ScoredCsv,
    /// `{"word", "gender": m|f|n|o}` per line, or one JSON array of such objects.
    GenderTagJson,
    AvaJsonl,
    PronounLists,
    NameLists,
    /// One serialized [`DictEntry`] per line, as written by this tool.
    EntriesJsonl,
}

impl DictFormat {
    pub const NAMES: [&'static str; 7] = [
        "categorical_list",
        "scored_csv",
        "gender_tag_json",
        "ava_jsonl",
        "pronoun_lists",
        "name_lists",
        "entries_jsonl",
    ];

    /// Guess from a file extension: `.csv`, `.jsonl`, `.json`, `.txt`.
    pub fn infer(path: &Path) -> Option<Self> {
        match path.extension()?.to_str()? {
            "csv" => Some(DictFormat::ScoredCsv),
            "jsonl" => Some(DictFormat::EntriesJsonl),
            "json" => Some(DictFormat::GenderTagJson),
            "txt" => Some(DictFormat::CategoricalList),
            _ => None,
        }
    }
}

impl FromStr for DictFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "categorical_list" => DictFormat::CategoricalList,
            "scored_csv" => DictFormat::ScoredCsv,
            "gender_tag_json" => DictFormat::GenderTagJson,
            "ava_jsonl" => DictFormat::AvaJsonl,
            "pronoun_lists" => DictFormat::PronounLists,
            "name_lists" => DictFormat::NameLists,
            "entries_jsonl" => DictFormat::EntriesJsonl,
            other => {
                return Err(Error::validation(
                    "dict_format",
                    format!(
                        "unknown dictionary format `{other}` (expected one of {})",
                        DictFormat::NAMES.join(", ")
                    ),
                ))
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum LoadedSource {
    Dictionary(Dictionary),
    /// Scored lists need a threshold policy before they become a dictionary.
    Scored(ScoredList),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Loaded {
    pub source: LoadedSource,
    /// Records dropped as duplicates after normalization.
    pub duplicates: usize,
}

impl Loaded {
    pub fn into_dictionary(self) -> Option<Dictionary> {
        match self.source {
            LoadedSource::Dictionary(d) => Some(d),
            LoadedSource::Scored(_) => None,
        }
    }
}

pub fn load_dictionary(path: &Path, format: DictFormat) -> Result<Loaded> {
    let text = fs::read_to_string(path)?;
    let name = path
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("dictionary");
    parse_dictionary(name, &text, format)
}

/// Parses dictionary text; `name` doubles as the entries' `source_id`.
pub fn parse_dictionary(name: &str, text: &str, format: DictFormat) -> Result<Loaded> {
    let entries = match format {
        DictFormat::ScoredCsv => {
            return Ok(Loaded {
                source: LoadedSource::Scored(parse_scored(name, text)?),
                duplicates: 0,
            })
        }
        DictFormat::CategoricalList => parse_sections(name, text, Category::GenderedLanguage)?,
        DictFormat::PronounLists => parse_sections(name, text, Category::Pronoun)?,
        DictFormat::NameLists => parse_sections(name, text, Category::Name)?,
        DictFormat::GenderTagJson => parse_tagged(name, text)?,
        DictFormat::AvaJsonl => parse_ava(text)?
            .into_iter()
            .map(|a| DictEntry::new(a.term, a.original_gender, Category::GenderedLanguage, name))
            .collect(),
        DictFormat::EntriesJsonl => parse_entries(text)?,
    };
    for e in &entries {
        validate_pattern(&e.pattern)?;
    }
    let (dictionary, duplicates) =
        Dictionary::build(name, entries, DictMetadata::default(), &StopWords::english());
    Ok(Loaded {
        source: LoadedSource::Dictionary(dictionary),
        duplicates,
    })
}

fn parse_sections(name: &str, text: &str, category: Category) -> Result<Vec<DictEntry>> {
    let mut gender: Option<GenderClass> = None;
    let mut out = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(header) = line.strip_prefix('#') {
            gender = Some(header.trim().parse::<GenderClass>().map_err(|_| {
                Error::validation(
                    "gender",
                    format!("unknown gender section `{}` at line {}", header.trim(), idx + 1),
                )
            })?);
            continue;
        }
        let g = gender.ok_or_else(|| {
            Error::parse(idx + 1, "term before the first `#<gender>` section header")
        })?;
        out.push(DictEntry::new(line, g, category, name));
    }
    Ok(out)
}

fn parse_scored(name: &str, text: &str) -> Result<ScoredList> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| Error::parse(1, e.to_string()))?
        .clone();
    if headers.len() < 2 || &headers[0] != "word" || &headers[1] != "score" {
        return Err(Error::parse(1, "expected header `word,score`"));
    }
    let mut words = Vec::new();
    for (idx, rec) in reader.records().enumerate() {
        let line = idx + 2;
        let rec = rec.map_err(|e| Error::parse(line, e.to_string()))?;
        let word = rec.get(0).unwrap_or_default().to_string();
        validate_pattern(&word)?;
        let score: f64 = rec
            .get(1)
            .unwrap_or_default()
            .parse()
            .map_err(|_| Error::parse(line, "score is not a decimal number"))?;
        words.push(ScoredWord { word, score });
    }
    Ok(ScoredList {
        source_id: name.to_string(),
        words,
    })
}

#[derive(Deserialize)]
struct Tagged {
    word: String,
    gender: String,
}

fn parse_tagged(name: &str, text: &str) -> Result<Vec<DictEntry>> {
    let to_entry = |t: Tagged| -> Result<DictEntry> {
        let g = GenderClass::from_code(&t.gender)?;
        Ok(DictEntry::new(t.word, g, Category::MarkedWord, name))
    };
    if text.trim_start().starts_with('[') {
        let all: Vec<Value> =
            serde_json::from_str(text).map_err(|e| Error::parse(e.line(), e.to_string()))?;
        return all
            .into_iter()
            .map(|v| {
                serde_json::from_value::<Tagged>(v)
                    .map_err(|e| Error::parse(0, e.to_string()))
                    .and_then(to_entry)
            })
            .collect();
    }
    let mut out = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let t: Tagged =
            serde_json::from_str(line).map_err(|e| Error::parse(idx + 1, e.to_string()))?;
        out.push(to_entry(t)?);
    }
    Ok(out)
}

fn parse_entries(text: &str) -> Result<Vec<DictEntry>> {
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
