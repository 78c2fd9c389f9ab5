use std::collections::BTreeMap;
use std::io::BufRead;

use serde_json::{Map, Value};

use super::{Corpus, Partition, SourceFormat, Utterance};
use crate::error::{Error, Result};

const META_FIELDS: [&str; 4] = ["locale", "scenario", "intent", "worker_id"];

/// Parses a MASSIVE JSONL dump: one object per non-blank line with at least
/// `id`, `partition` and `utt`. The unannotated `utt` field is used as text.
pub fn parse_massive<R: BufRead>(name: &str, reader: R) -> Result<Corpus> {
    let mut utterances = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let value: Value =
            serde_json::from_str(trimmed).map_err(|e| Error::parse(lineno, e.to_string()))?;
        let obj = value
            .as_object()
            .ok_or_else(|| Error::parse(lineno, "expected a JSON object"))?;
        utterances.push(record(obj, lineno)?);
    }
    Corpus::new(name, SourceFormat::MassiveJsonl, utterances)
}

fn record(obj: &Map<String, Value>, lineno: usize) -> Result<Utterance> {
    let id = scalar(obj, "id").ok_or_else(|| Error::parse(lineno, "missing field `id`"))?;
    if id.is_empty() {
        return Err(Error::parse(lineno, "empty `id`"));
    }
    let partition = obj
        .get("partition")
        .and_then(Value::as_str)
        .ok_or_else(|| Error::parse(lineno, "missing field `partition`"))?;
    let partition: Partition = partition.parse()?;
    let text = obj
        .get("utt")
        .and_then(Value::as_str)
        .ok_or_else(|| Error::parse(lineno, "missing field `utt`"))?
        .to_string();

    let mut meta = BTreeMap::new();
    for key in META_FIELDS {
        if let Some(v) = scalar(obj, key) {
            meta.insert(key.to_string(), v);
        }
    }
    Ok(Utterance {
        id,
        partition,
        text,
        meta,
    })
}

/// Strings pass through; numbers are rendered in their JSON form.
pub(super) fn scalar(obj: &Map<String, Value>, key: &str) -> Option<String> {
    match obj.get(key)? {
        Value::String(s) => Some(s.clone()),
        Value::Number(n) => Some(n.to_string()),
        _ => None,
    }
}
