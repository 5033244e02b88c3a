//! `transform`, `estimate` and `oracle-diff`: streaming over JSONL batch records.

use std::io::{self, BufRead, Write};

use serde_json::{json, Map, Value};

use passk::oracle::{self, OracleBudget};
use passk::{apply, maxg_at_k, pass_at_k_binary, BinaryBatch, Error, Method, TransformConfig};

use crate::records::{parse_line, BatchRecord, Payload};
use crate::ExitStatus;

/// Largest deviation from the oracle that `oracle-diff` accepts.
pub const ORACLE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Default, Clone, Copy, PartialEq, Eq)]
pub struct Tally {
    pub parse_errors: usize,
    pub invalid: usize,
}

impl Tally {
    pub fn status(&self) -> ExitStatus {
        if self.parse_errors > 0 {
            ExitStatus::ParseError
        } else if self.invalid > 0 {
            ExitStatus::Invalid
        } else {
            ExitStatus::Ok
        }
    }
}

/// Reads records line by line and hands each to `handle`, counting failures.
/// Blank lines are ignored.
fn for_each_record(
    input: impl BufRead,
    mut handle: impl FnMut(Result<BatchRecord, (usize, String)>) -> io::Result<()>,
) -> io::Result<()> {
    for (i, line) in input.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        handle(parse_line(i + 1, &line).map_err(|e| (i + 1, e)))?;
    }
    Ok(())
}

/// Echoes every record with one extra `(key, value)` field from `compute`.
/// Records that fail get an `"error"` field instead and are reported on stderr.
fn annotate(
    input: impl BufRead,
    output: &mut impl Write,
    mut compute: impl FnMut(&BatchRecord) -> passk::Result<(&'static str, Value)>,
) -> io::Result<Tally> {
    let mut tally = Tally::default();
    for_each_record(input, |parsed| {
        let fields = match parsed {
            Err((line, msg)) => {
                eprintln!("warning: line {line}: {msg}");
                tally.parse_errors += 1;
                let mut m = Map::new();
                m.insert("line".into(), json!(line));
                m.insert("error".into(), json!(msg));
                m
            }
            Ok(record) => {
                let mut fields = record.fields.clone();
                match compute(&record) {
                    Ok((key, v)) => {
                        fields.insert(key.into(), v);
                    }
                    Err(e) => {
                        eprintln!("warning: {}: {e}", record.label());
                        tally.invalid += 1;
                        fields.insert("error".into(), json!(e.to_string()));
                    }
                }
                fields
            }
        };
        serde_json::to_writer(&mut *output, &fields)?;
        output.write_all(b"\n")
    })?;
    output.flush()?;
    Ok(tally)
}

pub fn transform(
    config: &TransformConfig,
    input: impl BufRead,
    output: &mut impl Write,
) -> io::Result<Tally> {
    annotate(input, output, |record| {
        let t = apply(config, &record.payload.rewards())?;
        Ok(("transformed", json!(t.values())))
    })
}

pub fn estimate(k: usize, input: impl BufRead, output: &mut impl Write) -> io::Result<Tally> {
    annotate(input, output, |record| match &record.payload {
        Payload::Flags(f) => Ok((
            "pass_at_k",
            json!(pass_at_k_binary(f.len(), f.correct(), k)?),
        )),
        Payload::Rewards(r) => Ok(("maxg_at_k", json!(maxg_at_k(r, k)?))),
    })
}

#[derive(Debug, Default, Clone, Copy, PartialEq)]
pub struct DiffReport {
    pub records: usize,
    pub checked: usize,
    pub skipped: usize,
    pub max_abs_deviation: f64,
    pub tally: Tally,
}

impl DiffReport {
    pub fn status(&self) -> ExitStatus {
        match self.tally.status() {
            ExitStatus::Ok if self.max_abs_deviation > ORACLE_TOLERANCE => ExitStatus::Invalid,
            s => s,
        }
    }

    pub fn to_json(self) -> Value {
        json!({
            "records": self.records,
            "checked": self.checked,
            "skipped": self.skipped,
            "parse_errors": self.tally.parse_errors,
            "invalid": self.tally.invalid,
            "max_abs_deviation": self.max_abs_deviation,
            "tolerance": ORACLE_TOLERANCE,
        })
    }
}

fn oracle_output(
    method: Method,
    record: &BatchRecord,
    k: usize,
    budget: &OracleBudget,
) -> passk::Result<Vec<f64>> {
    let g = record.payload.rewards();
    match method {
        Method::BasicLoo => oracle::oracle_basic_loo(&g),
        Method::S => oracle::oracle_s(&g, k, budget),
        Method::Sloo => oracle::oracle_sloo(&g, k, budget),
        Method::SlooMinusOne => oracle::oracle_sloo_minus_one(&g, k, budget),
        Method::BinaryWeights => {
            oracle::oracle_binary_weights(&BinaryBatch::from_values(&g)?, k, budget)
        }
    }
}

fn candidate_output(config: &TransformConfig, record: &BatchRecord) -> Result<Vec<f64>, String> {
    match record.fields.get("transformed") {
        None => apply(config, &record.payload.rewards())
            .map(|t| t.into_inner())
            .map_err(|e| e.to_string()),
        Some(Value::Array(items)) => items
            .iter()
            .enumerate()
            .map(|(i, v)| {
                v.as_f64()
                    .ok_or_else(|| format!("transformed[{i}] is not a number"))
            })
            .collect(),
        Some(_) => Err("\"transformed\" must be an array".into()),
    }
}

/// Compares each record's `"transformed"` field (or the library's output when
/// absent) against subset enumeration.
pub fn oracle_diff(
    config: &TransformConfig,
    budget: &OracleBudget,
    input: impl BufRead,
) -> io::Result<DiffReport> {
    let mut report = DiffReport::default();
    for_each_record(input, |parsed| {
        report.records += 1;
        let record = match parsed {
            Ok(r) => r,
            Err((line, msg)) => {
                eprintln!("warning: line {line}: {msg}");
                report.tally.parse_errors += 1;
                return Ok(());
            }
        };
        let expected = match oracle_output(config.method(), &record, config.k(), budget) {
            Ok(v) => v,
            Err(e @ Error::OracleBudget { .. }) => {
                eprintln!("warning: skipping {}: {e}", record.label());
                report.skipped += 1;
                return Ok(());
            }
            Err(e) => {
                eprintln!("warning: {}: {e}", record.label());
                report.tally.invalid += 1;
                return Ok(());
            }
        };
        let got = match candidate_output(config, &record) {
            Ok(v) if v.len() == expected.len() => v,
            Ok(v) => {
                eprintln!(
                    "warning: {}: {} transformed values for {} rewards",
                    record.label(),
                    v.len(),
                    expected.len()
                );
                report.tally.invalid += 1;
                return Ok(());
            }
            Err(e) => {
                eprintln!("warning: {}: {e}", record.label());
                report.tally.invalid += 1;
                return Ok(());
            }
        };
        let dev = got
            .iter()
            .zip(&expected)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        if dev > ORACLE_TOLERANCE {
            eprintln!(
                "warning: {}: deviation {dev:e} exceeds {ORACLE_TOLERANCE:e}",
                record.label()
            );
        }
        report.max_abs_deviation = report.max_abs_deviation.max(dev);
        report.checked += 1;
        Ok(())
    })?;
    Ok(report)
}
