use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};

use genderlex_core::corpus::{parse_massive, parse_redial};
use genderlex_core::lexicon::{
    apply_threshold, load_dictionary, merge, parse_ava, shipped_ava, DictFormat, LoadedSource,
    ThresholdPolicy,
};
use genderlex_core::{AvaEntry, Category, Corpus, Dictionary, Error, Partition, PipelineProfile, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorpusFormat {
    Massive,
    Redial,
}

impl std::str::FromStr for CorpusFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "massive" => Ok(CorpusFormat::Massive),
            "redial" => Ok(CorpusFormat::Redial),
            other => Err(Error::Validation {
                field: "format".into(),
                message: format!("unknown corpus format `{other}` (expected massive or redial)"),
            }),
        }
    }
}

impl CorpusFormat {
    pub fn as_str(self) -> &'static str {
        match self {
            CorpusFormat::Massive => "massive",
            CorpusFormat::Redial => "redial",
        }
    }
}

/// One corpus file. Files sharing a name are concatenated into one corpus.
#[derive(Debug, Clone, PartialEq)]
pub struct CorpusSpec {
    pub name: Option<String>,
    pub path: PathBuf,
    pub format: Option<CorpusFormat>,
    pub partition: Option<Partition>,
}

impl CorpusSpec {
    /// Parses `[NAME=]PATH`.
    pub fn parse(s: &str, format: Option<CorpusFormat>, partition: Option<Partition>) -> Self {
        let (name, path) = match s.split_once('=') {
            Some((n, p)) if !n.is_empty() && !n.contains(['/', '\\']) => (Some(n.to_string()), p),
            _ => (None, s),
        };
        CorpusSpec {
            name,
            path: PathBuf::from(path),
            format,
            partition,
        }
    }
}

/// Reads the first record to tell MASSIVE (`utt`) from ReDial (`messages`).
pub fn sniff_format(path: &Path) -> Result<CorpusFormat> {
    let reader = BufReader::new(File::open(path)?);
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let v: serde_json::Value = serde_json::from_str(&line).map_err(|e| Error::Parse {
            line: idx + 1,
            message: e.to_string(),
        })?;
        if v.get("messages").is_some() {
            return Ok(CorpusFormat::Redial);
        }
        if v.get("utt").is_some() {
            return Ok(CorpusFormat::Massive);
        }
        break;
    }
    Err(Error::Validation {
        field: "format".into(),
        message: format!("cannot tell the format of {}; pass --format", path.display()),
    })
}

/// `train`, `test` or `dev`/`valid` in the file name, else unpartitioned.
pub fn partition_from_name(path: &Path) -> Partition {
    let name = path
        .file_name()
        .map(|s| s.to_string_lossy().to_lowercase())
        .unwrap_or_default();
    if name.contains("train") {
        Partition::Train
    } else if name.contains("test") {
        Partition::Test
    } else if name.contains("dev") || name.contains("valid") {
        Partition::Dev
    } else {
        Partition::Unpartitioned
    }
}

fn load_one(spec: &CorpusSpec) -> Result<(String, Corpus)> {
    let format = match spec.format {
        Some(f) => f,
        None => sniff_format(&spec.path)?,
    };
    let name = spec
        .name
        .clone()
        .unwrap_or_else(|| format.as_str().to_string());
    let reader = BufReader::new(File::open(&spec.path).map_err(|e| {
        Error::Io(std::io::Error::new(
            e.kind(),
            format!("{}: {e}", spec.path.display()),
        ))
    })?);
    let corpus = match format {
        CorpusFormat::Massive => parse_massive(&name, reader)?,
        CorpusFormat::Redial => {
            let p = spec
                .partition
                .unwrap_or_else(|| partition_from_name(&spec.path));
            parse_redial(&name, reader, p)?
        }
    };
    Ok((name, corpus))
}

/// Loads every file and concatenates files with the same name, keeping the
/// order in which names first appear.
pub fn load_corpora(specs: &[CorpusSpec]) -> Result<Vec<Corpus>> {
    let mut groups: Vec<(String, Vec<Corpus>)> = Vec::new();
    for spec in specs {
        let (name, c) = load_one(spec)?;
        match groups.iter_mut().find(|(n, _)| *n == name) {
            Some((_, parts)) => parts.push(c),
            None => groups.push((name, vec![c])),
        }
    }
    groups
        .into_iter()
        .map(|(name, mut parts)| {
            if parts.len() == 1 {
                Ok(parts.pop().expect("one part"))
            } else {
                Corpus::concat(name, parts)
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct DictSpec {
    pub path: PathBuf,
    pub format: Option<DictFormat>,
    pub threshold: Option<ThresholdPolicy>,
}

pub fn load_one_dictionary(spec: &DictSpec) -> Result<Dictionary> {
    let format = match spec.format {
        Some(f) => f,
        None => DictFormat::infer(&spec.path).ok_or_else(|| Error::Validation {
            field: "dict_format".into(),
            message: format!(
                "cannot infer the format of {}; pass --dict-format",
                spec.path.display()
            ),
        })?,
    };
    let loaded = load_dictionary(&spec.path, format)?;
    match loaded.source {
        LoadedSource::Dictionary(d) => Ok(d),
        LoadedSource::Scored(list) => {
            let policy = spec.threshold.ok_or_else(|| Error::Validation {
                field: "threshold".into(),
                message: format!(
                    "{} is a scored list; pass --threshold loose or conservative",
                    spec.path.display()
                ),
            })?;
            apply_threshold(&list, &policy)
        }
    }
}

/// Loads and merges; a single dictionary is returned unchanged.
pub fn load_dictionaries(specs: &[DictSpec]) -> Result<Dictionary> {
    if specs.is_empty() {
        return Err(Error::Validation {
            field: "dict".into(),
            message: "at least one --dict is required".into(),
        });
    }
    let mut dicts = specs
        .iter()
        .map(load_one_dictionary)
        .collect::<Result<Vec<_>>>()?;
    if dicts.len() == 1 {
        Ok(dicts.pop().expect("one dictionary"))
    } else {
        Ok(merge(&dicts))
    }
}

/// A file path, or `shipped` for the bundled list.
pub fn load_ava(source: &str) -> Result<Vec<AvaEntry>> {
    if source == "shipped" {
        return shipped_ava();
    }
    parse_ava(&std::fs::read_to_string(source)?)
}

/// The preset matching the dictionary's single category.
pub fn default_profile(d: &Dictionary) -> Result<PipelineProfile> {
    match d.categories().as_slice() {
        [Category::GenderedLanguage] | [] => Ok(PipelineProfile::gendered_language()),
        [Category::Pronoun] => Ok(PipelineProfile::pronouns()),
        [Category::MarkedWord] => Ok(PipelineProfile::marked_words()),
        [Category::Name] => Ok(PipelineProfile::names()),
        _ => Err(Error::Config(
            "dictionary mixes categories; choose one with --profile".into(),
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corpus_spec_syntax() {
        let s = CorpusSpec::parse("redial=data/train_data.jsonl", None, None);
        assert_eq!(s.name.as_deref(), Some("redial"));
        assert_eq!(s.path, Path::new("data/train_data.jsonl"));
        let s = CorpusSpec::parse("data/a=b.jsonl", None, None);
        assert_eq!(s.name, None);
    }

    #[test]
    fn partitions_from_file_names() {
        assert_eq!(partition_from_name(Path::new("x/train_data.jsonl")), Partition::Train);
        assert_eq!(partition_from_name(Path::new("test_data.jsonl")), Partition::Test);
        assert_eq!(partition_from_name(Path::new("dialogs.jsonl")), Partition::Unpartitioned);
    }
}
