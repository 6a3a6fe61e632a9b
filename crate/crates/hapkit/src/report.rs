//! Certification reports: a machine form with stable key order and a
//! plain-text rendering of the same data.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use hapkit_core::report::Verdict;
use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

pub const TOOL: &str = "hapkit";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Numeric defaults, printed in every report whether or not they apply.
pub const DEFAULT_TOL: f64 = 1e-9;
pub const DEFAULT_EPS_DECAY: f64 = 1e-3;
pub const DEFAULT_MAX_WORD_LENGTH: usize = 3;

/// Witnesses shown per verdict in the text form; the JSON form has all.
const MAX_TEXT_WITNESSES: usize = 10;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WitnessRecord {
    pub label: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub index: Option<usize>,
    pub value: f64,
    pub threshold: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerdictRecord {
    pub condition: String,
    pub status: &'static str,
    pub witnesses: Vec<WitnessRecord>,
    #[serde(skip_serializing_if = "String::is_empty")]
    pub note: String,
}

impl VerdictRecord {
    pub fn pass(&self) -> bool {
        self.status == "PASS"
    }
}

impl From<&Verdict> for VerdictRecord {
    fn from(v: &Verdict) -> Self {
        Self {
            condition: v.condition.clone(),
            status: status(v.pass),
            witnesses: v
                .witnesses
                .iter()
                .map(|w| WitnessRecord {
                    label: w.label.clone(),
                    index: w.index,
                    value: w.value + 0.0,
                    threshold: w.threshold + 0.0,
                })
                .collect(),
            note: v.note.clone(),
        }
    }
}

fn status(pass: bool) -> &'static str {
    if pass {
        "PASS"
    } else {
        "FAIL"
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CertificationReport {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub input_digest: String,
    pub defaults: BTreeMap<&'static str, Value>,
    pub truncation: BTreeMap<String, Value>,
    pub tolerances: BTreeMap<String, f64>,
    pub verdicts: Vec<VerdictRecord>,
    pub notes: Vec<String>,
    pub overall: &'static str,
}

/// SHA-256 of the compact serialization of `value`. Object keys serialize
/// sorted, so equal JSON documents hash equally regardless of layout.
pub fn digest(value: &Value) -> String {
    let canonical = serde_json::to_string(value).expect("serializable");
    hex::encode(Sha256::digest(canonical.as_bytes()))
}

impl CertificationReport {
    pub fn new(command: &str, input: &Value) -> Self {
        let defaults = BTreeMap::from([
            ("eps_decay", Value::from(DEFAULT_EPS_DECAY)),
            ("max_word_length", Value::from(DEFAULT_MAX_WORD_LENGTH)),
            ("tol", Value::from(DEFAULT_TOL)),
        ]);
        Self {
            tool: TOOL,
            version: VERSION,
            command: command.to_string(),
            input_digest: digest(input),
            defaults,
            truncation: BTreeMap::new(),
            tolerances: BTreeMap::new(),
            verdicts: Vec::new(),
            notes: Vec::new(),
            overall: "PASS",
        }
    }

    pub fn truncation(&mut self, key: &str, value: impl Into<Value>) -> &mut Self {
        self.truncation.insert(key.to_string(), value.into());
        self
    }

    pub fn tolerance(&mut self, key: &str, value: f64) -> &mut Self {
        self.tolerances.insert(key.to_string(), value);
        self
    }

    pub fn verdict(&mut self, v: impl Into<VerdictRecord>) -> &mut Self {
        let v = v.into();
        if !v.pass() {
            self.overall = "FAIL";
        }
        self.verdicts.push(v);
        self
    }

    pub fn note(&mut self, note: impl Into<String>) -> &mut Self {
        self.notes.push(note.into());
        self
    }

    pub fn pass(&self) -> bool {
        self.overall == "PASS"
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("serializable");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{} {} {}", self.tool, self.version, self.command);
        let _ = writeln!(out, "input sha256: {}", self.input_digest);
        let _ = writeln!(out, "defaults: {}", join_map(self.defaults.iter().map(|(k, v)| (*k, v))));
        let _ = writeln!(out, "truncation: {}", join_map(self.truncation.iter().map(|(k, v)| (k.as_str(), v))));
        let tolerances: Vec<String> = self.tolerances.iter().map(|(k, v)| format!("{k}={}", num(*v))).collect();
        let _ = writeln!(out, "tolerances: {}", or_none(tolerances.join(" ")));
        for v in &self.verdicts {
            let _ = writeln!(out, "[{}] {}", v.status, v.condition);
            if !v.note.is_empty() {
                let _ = writeln!(out, "    note: {}", v.note);
            }
            for w in v.witnesses.iter().take(MAX_TEXT_WITNESSES) {
                let label = if w.label.is_empty() { "∅" } else { w.label.as_str() };
                let at = w.index.map(|i| format!(" (sequence index {i})")).unwrap_or_default();
                let _ = writeln!(
                    out,
                    "    {} {}{at}: value {} vs threshold {}",
                    if v.pass() { "tightest" } else { "witness" },
                    label,
                    num(w.value),
                    num(w.threshold)
                );
            }
            if v.witnesses.len() > MAX_TEXT_WITNESSES {
                let _ = writeln!(
                    out,
                    "    ... {} more witnesses in the JSON report",
                    v.witnesses.len() - MAX_TEXT_WITNESSES
                );
            }
        }
        for n in &self.notes {
            let _ = writeln!(out, "note: {n}");
        }
        let _ = writeln!(out, "overall: {}", self.overall);
        out
    }
}

fn join_map<'a>(it: impl Iterator<Item = (&'a str, &'a Value)>) -> String {
    let parts: Vec<String> = it
        .map(|(k, v)| match v {
            Value::Number(n) => format!("{k}={}", n.as_f64().map(num).unwrap_or_else(|| n.to_string())),
            Value::String(s) => format!("{k}={s}"),
            other => format!("{k}={other}"),
        })
        .collect();
    or_none(parts.join(" "))
}

fn or_none(s: String) -> String {
    if s.is_empty() {
        "none".into()
    } else {
        s
    }
}

/// Plain decimals for moderate magnitudes, scientific notation otherwise.
pub fn num(x: f64) -> String {
    let x = x + 0.0;
    if x == 0.0 || x.is_nan() || x.is_infinite() || (1e-3..1e6).contains(&x.abs()) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}
