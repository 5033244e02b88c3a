//! Line-delimited JSON batch records: `{"id"?: string, "rewards": [..]}` or
//! `{"id"?: string, "flags": [0/1 or bool, ..]}`.

use std::fmt;

use serde_json::{Map, Value};

use passk::{BinaryBatch, RewardBatch};

#[derive(Debug, Clone, PartialEq)]
pub enum Payload {
    Rewards(RewardBatch),
    Flags(BinaryBatch),
}

impl Payload {
    /// Rewards as reals, with flags mapped to 0.0 / 1.0.
    pub fn rewards(&self) -> RewardBatch {
        match self {
            Payload::Rewards(r) => r.clone(),
            Payload::Flags(f) => RewardBatch::from(f),
        }
    }
}

/// One parsed input line. `fields` keeps the original object so output can
/// echo it verbatim with extra keys appended.
#[derive(Debug, Clone)]
pub struct BatchRecord {
    pub line: usize,
    pub id: Option<String>,
    pub payload: Payload,
    pub fields: Map<String, Value>,
}

impl BatchRecord {
    pub fn label(&self) -> RecordLabel<'_> {
        RecordLabel {
            line: self.line,
            id: self.id.as_deref(),
        }
    }
}

pub struct RecordLabel<'a> {
    line: usize,
    id: Option<&'a str>,
}

impl fmt::Display for RecordLabel<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.id {
            Some(id) => write!(f, "record '{id}' (line {})", self.line),
            None => write!(f, "record on line {}", self.line),
        }
    }
}

pub fn parse_line(line: usize, text: &str) -> Result<BatchRecord, String> {
    let value: Value = serde_json::from_str(text).map_err(|e| format!("invalid JSON: {e}"))?;
    let Value::Object(fields) = value else {
        return Err("record must be a JSON object".into());
    };
    let id = match fields.get("id") {
        None => None,
        Some(Value::String(s)) => Some(s.clone()),
        Some(_) => return Err("\"id\" must be a string".into()),
    };
    let payload = match (fields.get("rewards"), fields.get("flags")) {
        (Some(r), None) => Payload::Rewards(parse_rewards(r)?),
        (None, Some(f)) => Payload::Flags(parse_flags(f)?),
        (Some(_), Some(_)) => return Err("record has both \"rewards\" and \"flags\"".into()),
        (None, None) => return Err("record needs \"rewards\" or \"flags\"".into()),
    };
    Ok(BatchRecord {
        line,
        id,
        payload,
        fields,
    })
}

fn array(v: &Value, key: &str) -> Result<Vec<Value>, String> {
    match v {
        Value::Array(items) => Ok(items.clone()),
        _ => Err(format!("\"{key}\" must be an array")),
    }
}

fn parse_rewards(v: &Value) -> Result<RewardBatch, String> {
    let values = array(v, "rewards")?
        .iter()
        .enumerate()
        .map(|(i, x)| {
            x.as_f64()
                .ok_or_else(|| format!("rewards[{i}] is not a number"))
        })
        .collect::<Result<Vec<f64>, String>>()?;
    RewardBatch::new(values).map_err(|e| e.to_string())
}

fn parse_flags(v: &Value) -> Result<BinaryBatch, String> {
    let flags = array(v, "flags")?
        .iter()
        .enumerate()
        .map(|(i, x)| match x {
            Value::Bool(b) => Ok(*b),
            Value::Number(n) if n.as_f64() == Some(0.0) => Ok(false),
            Value::Number(n) if n.as_f64() == Some(1.0) => Ok(true),
            _ => Err(format!("flags[{i}] must be 0, 1, true or false")),
        })
        .collect::<Result<Vec<bool>, String>>()?;
    BinaryBatch::new(flags).map_err(|e| e.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_both_payloads() {
        let r = parse_line(1, r#"{"id":"a","rewards":[1,2.5]}"#).unwrap();
        assert_eq!(r.id.as_deref(), Some("a"));
        assert_eq!(r.payload.rewards().values(), &[1.0, 2.5]);
        let f = parse_line(2, r#"{"flags":[0,1,true]}"#).unwrap();
        assert!(matches!(&f.payload, Payload::Flags(b) if b.correct() == 2));
        assert_eq!(f.payload.rewards().values(), &[0.0, 1.0, 1.0]);
    }

    #[test]
    fn rejects_malformed_records() {
        for bad in [
            "not json",
            "[1,2]",
            r#"{"id":3,"rewards":[1]}"#,
            r#"{"rewards":[1],"flags":[1]}"#,
            r#"{"other":[1]}"#,
            r#"{"rewards":[]}"#,
            r#"{"rewards":["x"]}"#,
            r#"{"flags":[2]}"#,
            r#"{"rewards":1}"#,
        ] {
            assert!(parse_line(1, bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn labels_name_the_record() {
        let r = parse_line(4, r#"{"id":"q7","rewards":[1]}"#).unwrap();
        assert_eq!(r.label().to_string(), "record 'q7' (line 4)");
        let r = parse_line(5, r#"{"rewards":[1]}"#).unwrap();
        assert_eq!(r.label().to_string(), "record on line 5");
    }
}
