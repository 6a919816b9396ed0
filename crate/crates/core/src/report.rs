//! Report envelope with a reproducible payload.
//!
//! Every experiment emits one JSON document of the form
//!
//! ```text
//! { "header": { "generated_unix_seconds": ... },
//!   "payload": { "version": ..., "seed": ..., "config": ..., "results": ... } }
//! ```
//!
//! The clock lives only in the header, so identical config and seed produce a
//! byte-identical `payload` and golden-file diffs stay clean. The payload
//! embeds the resolved config and library version; serialization is
//! `serde_json` pretty form with struct field order, which is deterministic.
//!
//! For tabular consumers the payload flattens to `key,value` CSV rows with
//! dotted paths and bracketed array indices.

use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use serde_json::Value;

use crate::error::Result;

/// Wall-clock metadata, deliberately outside the payload.
#[derive(Debug, Clone, Serialize)]
pub struct ReportHeader {
    pub generated_unix_seconds: u64,
}

/// The reproducible part: everything a rerun with the same inputs must
/// reproduce byte for byte.
#[derive(Debug, Clone, Serialize)]
pub struct ReportPayload<T: Serialize> {
    pub version: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub config: Value,
    pub results: T,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report<T: Serialize> {
    pub header: ReportHeader,
    pub payload: ReportPayload<T>,
}

impl<T: Serialize> Report<T> {
    /// Wrap results with the resolved config; `config` should be the
    /// serialization of the spec actually used, not the raw input text.
    pub fn new(config: &impl Serialize, seed: Option<u64>, results: T) -> Result<Self> {
        let now = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        Ok(Report {
            header: ReportHeader {
                generated_unix_seconds: now,
            },
            payload: ReportPayload {
                version: crate::VERSION.to_string(),
                seed,
                config: serde_json::to_value(config)?,
                results,
            },
        })
    }

    /// Full document, header included.
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Payload only; the byte-identical reproducibility surface.
    pub fn payload_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.payload)?)
    }

    /// Payload flattened to `key,value` rows.
    pub fn payload_csv(&self) -> Result<String> {
        let value = serde_json::to_value(&self.payload)?;
        let mut rows = vec![("key".to_string(), "value".to_string())];
        flatten_value("", &value, &mut rows);
        let mut out = String::new();
        for (k, v) in rows {
            out.push_str(&csv_field(&k));
            out.push(',');
            out.push_str(&csv_field(&v));
            out.push('\n');
        }
        Ok(out)
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn flatten_value(prefix: &str, value: &Value, rows: &mut Vec<(String, String)>) {
    match value {
        Value::Object(map) => {
            for (k, v) in map {
                let key = if prefix.is_empty() {
                    k.clone()
                } else {
                    format!("{prefix}.{k}")
                };
                flatten_value(&key, v, rows);
            }
        }
        Value::Array(items) => {
            for (i, v) in items.iter().enumerate() {
                flatten_value(&format!("{prefix}[{i}]"), v, rows);
            }
        }
        Value::Null => rows.push((prefix.to_string(), String::new())),
        Value::Bool(b) => rows.push((prefix.to_string(), b.to_string())),
        // Numbers serialize through serde_json's canonical text, which is
        // what the JSON payload contains too, keeping the two formats
        // consistent.
        Value::Number(n) => rows.push((prefix.to_string(), n.to_string())),
        Value::String(s) => rows.push((prefix.to_string(), s.clone())),
    }
}
