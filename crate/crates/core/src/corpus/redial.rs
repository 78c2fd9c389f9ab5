use std::collections::BTreeMap;
use std::io::BufRead;

use serde_json::Value;

use super::massive::scalar;
use super::{Corpus, Partition, SourceFormat, Utterance};
use crate::error::{Error, Result};

/// Parses a ReDial dump: one dialogue object per line, each with a
/// `messages` array. Records carry no split, so every utterance gets
/// `partition` (the split the file came from).
///
/// Movie placeholders such as `@119144` are kept verbatim in the text; they
/// are flagged later, at tokenization.
pub fn parse_redial<R: BufRead>(name: &str, reader: R, partition: Partition) -> Result<Corpus> {
    let mut utterances = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let dialogue: Value =
            serde_json::from_str(trimmed).map_err(|e| Error::parse(lineno, e.to_string()))?;
        let obj = dialogue
            .as_object()
            .ok_or_else(|| Error::parse(lineno, "expected a dialogue object"))?;
        let dialogue_id = scalar(obj, "conversationId");
        let messages = obj
            .get("messages")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::parse(lineno, "missing `messages` array"))?;

        for (pos, message) in messages.iter().enumerate() {
            let msg = message.as_object().ok_or_else(|| {
                Error::parse(lineno, format!("message {pos} is not an object"))
            })?;
            let id = scalar(msg, "messageId").ok_or_else(|| {
                Error::parse(lineno, format!("message {pos} is missing `messageId`"))
            })?;
            let text = msg
                .get("text")
                .and_then(Value::as_str)
                .ok_or_else(|| Error::parse(lineno, format!("message {pos} is missing `text`")))?
                .to_string();

            let mut meta = BTreeMap::new();
            if let Some(d) = &dialogue_id {
                meta.insert("dialogue_id".to_string(), d.clone());
            }
            for (src, dst) in [
                ("senderWorkerId", "sender_worker_id"),
                ("messageId", "message_id"),
                ("timeOffset", "time_offset"),
            ] {
                if let Some(v) = scalar(msg, src) {
                    meta.insert(dst.to_string(), v);
                }
            }
            utterances.push(Utterance {
                id,
                partition,
                text,
                meta,
            });
        }
    }
    Corpus::new(name, SourceFormat::RedialJson, utterances)
}

#[cfg(test)]
mod tests {
    use super::*;

    const DIALOGUE: &str = r#"{"conversationId": "20001", "messages": [{"timeOffset": 48, "text": "I saw @119144 last night and really liked it!", "senderWorkerId": 30, "messageId": 3183}, {"timeOffset": 94, "text": "That was a good movie. If you like Superhero Movies you should check out @169419", "senderWorkerId": 44, "messageId": 3184}, {"timeOffset": 112, "text": "Is that out already? I really wanted to see that one.", "senderWorkerId": 30, "messageId": 3185}]}"#;

    #[test]
    fn parses_excerpt() {
        let c = parse_redial("redial", DIALOGUE.as_bytes(), Partition::Train).unwrap();
        assert_eq!(c.len(), 3);
        let u = &c.utterances[0];
        assert_eq!(u.id, "3183");
        assert_eq!(u.partition, Partition::Train);
        assert_eq!(u.meta["sender_worker_id"], "30");
        assert_eq!(u.meta["time_offset"], "48");
        assert_eq!(u.meta["dialogue_id"], "20001");
        assert_eq!(u.text, "I saw @119144 last night and really liked it!");
    }

    #[test]
    fn partition_comes_from_caller() {
        let c = parse_redial("redial", DIALOGUE.as_bytes(), Partition::Test).unwrap();
        assert!(c.utterances.iter().all(|u| u.partition == Partition::Test));
    }

    #[test]
    fn missing_message_id() {
        let input = r#"{"messages": [{"text": "hi", "senderWorkerId": 1}]}"#;
        assert!(matches!(
            parse_redial("r", input.as_bytes(), Partition::Train),
            Err(Error::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn duplicate_message_id_rejected() {
        let input = "{\"messages\": [{\"text\": \"a\", \"messageId\": 1}]}\n{\"messages\": [{\"text\": \"b\", \"messageId\": 1}]}";
        assert!(matches!(
            parse_redial("r", input.as_bytes(), Partition::Train),
            Err(Error::Validation { .. })
        ));
    }
}
