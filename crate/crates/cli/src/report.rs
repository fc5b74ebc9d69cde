//! Run reports: what a command read, every margin it measured, what it
//! produced and how it ended.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;
use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Ok,
    Warning,
    Error,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub command: String,
    pub inputs: BTreeMap<String, Value>,
    /// Named numeric margins.
    pub diagnostics: BTreeMap<String, f64>,
    pub outputs: BTreeMap<String, Value>,
    /// Human-readable verdict lines.
    pub summary: Vec<String>,
    pub status: Status,
    pub messages: Vec<String>,
    pub exit_code: i32,
}

impl RunReport {
    pub fn new(command: &str) -> Self {
        RunReport {
            command: command.to_string(),
            inputs: BTreeMap::new(),
            diagnostics: BTreeMap::new(),
            outputs: BTreeMap::new(),
            summary: Vec::new(),
            status: Status::Ok,
            messages: Vec::new(),
            exit_code: 0,
        }
    }

    pub fn input(&mut self, key: &str, value: impl Serialize) {
        self.inputs.insert(key.to_string(), serde_json::to_value(value).unwrap_or(Value::Null));
    }

    pub fn output(&mut self, key: &str, value: impl Serialize) {
        self.outputs.insert(key.to_string(), serde_json::to_value(value).unwrap_or(Value::Null));
    }

    pub fn diag(&mut self, key: impl Into<String>, value: f64) {
        self.diagnostics.insert(key.into(), value);
    }

    /// Records `value` and downgrades to a warning when it exceeds `limit`.
    pub fn check(&mut self, key: &str, value: f64, limit: f64) {
        self.diag(key, value);
        if !(value <= limit) {
            self.warn(format!("{key} = {} exceeds {}", fmt_num(value), fmt_num(limit)));
        }
    }

    pub fn line(&mut self, text: impl Into<String>) {
        self.summary.push(text.into());
    }

    pub fn warn(&mut self, message: impl Into<String>) {
        self.messages.push(message.into());
        if self.status == Status::Ok {
            self.status = Status::Warning;
            self.exit_code = 1;
        }
    }

    pub fn fail(&mut self, exit_code: i32, messages: impl IntoIterator<Item = String>) {
        self.messages.extend(messages);
        self.status = Status::Error;
        self.exit_code = exit_code;
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports contain only plain data")
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let status = match self.status {
            Status::Ok => "ok",
            Status::Warning => "warning",
            Status::Error => "error",
        };
        let _ = writeln!(s, "framekz {}: {status}", self.command);
        for line in &self.summary {
            let _ = writeln!(s, "  {line}");
        }
        for m in &self.messages {
            let _ = writeln!(s, "  {status}: {m}");
        }
        if !self.diagnostics.is_empty() {
            let _ = writeln!(s, "diagnostics:");
            for (k, v) in &self.diagnostics {
                let _ = writeln!(s, "  {k} = {}", fmt_num(*v));
            }
        }
        if !self.outputs.is_empty() {
            let _ = writeln!(s, "outputs:");
            for (k, v) in &self.outputs {
                let _ = writeln!(s, "  {k} = {v}");
            }
        }
        s
    }
}

/// Twelve significant digits, trailing zeros dropped; exponent form outside
/// `[1e-4, 1e12)`.
pub fn fmt_num(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return "0".to_string();
    }
    let rounded: f64 = format!("{x:.11e}").parse().unwrap_or(x);
    let a = rounded.abs();
    if (1e-4..1e12).contains(&a) {
        rounded.to_string()
    } else {
        format!("{rounded:e}")
    }
}

pub fn fmt_list(xs: &[f64]) -> String {
    xs.iter().map(|&x| fmt_num(x)).collect::<Vec<_>>().join(", ")
}
