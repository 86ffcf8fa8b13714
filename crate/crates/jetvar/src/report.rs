//! Command reports: canonical text lines and a versioned JSON encoding.
//!
//! Two runs of the same command on the same file produce byte-identical
//! output except for the JSON `timing_ms` field; the text rendering carries
//! no timing at all.

use serde::Serialize;
use std::collections::BTreeMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Ok,
    NonzeroResidual,
    Error,
}

/// Payload entries are canonical strings keyed by component labels; entry
/// order is fixed by the BTreeMap.
#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub schema: u32,
    pub command: String,
    pub status: Status,
    pub payload: BTreeMap<String, serde_json::Value>,
    pub timing_ms: u128,
}

impl Report {
    pub fn new(command: &str) -> Report {
        Report {
            schema: 1,
            command: command.to_string(),
            status: Status::Ok,
            payload: BTreeMap::new(),
            timing_ms: 0,
        }
    }

    pub fn put(&mut self, key: impl Into<String>, value: impl Into<serde_json::Value>) {
        self.payload.insert(key.into(), value.into());
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// One `key = value` line per payload entry, in key order.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.payload {
            let rendered = match v {
                serde_json::Value::String(s) => s.clone(),
                other => other.to_string(),
            };
            out.push_str(&format!("{k} = {rendered}\n"));
        }
        out.push_str(&format!("status: {}\n", match self.status {
            Status::Ok => "ok",
            Status::NonzeroResidual => "nonzero-residual",
            Status::Error => "error",
        }));
        out
    }
}
