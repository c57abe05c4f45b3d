use std::io::Write;
use std::path::Path;

use clap::ValueEnum;
use serde_json::{json, Value};
use sigcalc::reduction::ReductionError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

/// Process result: 0 pass, 1 failed check, 2 bad input, 3 rejected.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
    Invalid,
    Rejected,
}

pub struct Outcome {
    pub report: Value,
    pub verdict: Verdict,
    pub message: Option<String>,
}

impl Outcome {
    pub fn new(report: Value, verdict: Verdict) -> Self {
        Outcome {
            report,
            verdict,
            message: None,
        }
    }

    pub fn pass_if(report: Value, ok: bool) -> Self {
        Outcome::new(report, if ok { Verdict::Pass } else { Verdict::Fail })
    }

    pub fn error(command: &str, code: &str, message: String, verdict: Verdict) -> Self {
        Outcome {
            report: json!({
                "command": command,
                "status": "error",
                "error": { "code": code, "message": message },
            }),
            verdict,
            message: Some(message),
        }
    }

    pub fn from_reduction(command: &str, e: &ReductionError) -> Self {
        let verdict = match e {
            ReductionError::InvalidParameters(_) | ReductionError::PreconditionViolated(_) => {
                Verdict::Invalid
            }
            ReductionError::ClassNumberObstruction { .. } => Verdict::Rejected,
            _ => Verdict::Fail,
        };
        Outcome::error(command, e.code(), e.to_string(), verdict)
    }

    pub fn exit_code(&self) -> u8 {
        match self.verdict {
            Verdict::Pass => 0,
            Verdict::Fail => 1,
            Verdict::Invalid => 2,
            Verdict::Rejected => 3,
        }
    }
}

/// One `key: value` line per leaf, keys joined with dots.
fn flatten(prefix: &str, v: &Value, out: &mut String) {
    let key = |k: &str| {
        if prefix.is_empty() {
            k.to_string()
        } else {
            format!("{prefix}.{k}")
        }
    };
    match v {
        Value::Object(map) => {
            for (k, v) in map {
                flatten(&key(k), v, out);
            }
        }
        Value::Array(items) => {
            for (i, v) in items.iter().enumerate() {
                flatten(&key(&i.to_string()), v, out);
            }
        }
        Value::String(s) => out.push_str(&format!("{prefix}: {s}\n")),
        Value::Null => out.push_str(&format!("{prefix}: -\n")),
        other => out.push_str(&format!("{prefix}: {other}\n")),
    }
}

pub fn render(report: &Value, format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(report).expect("report serializes");
            s.push('\n');
            s
        }
        Format::Text => {
            let mut s = String::new();
            flatten("", report, &mut s);
            s
        }
    }
}

pub fn write(report: &Value, format: Format, path: Option<&Path>) -> std::io::Result<()> {
    let text = render(report, format);
    match path {
        Some(p) => std::fs::write(p, text),
        None => std::io::stdout().lock().write_all(text.as_bytes()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_flattens_nested_values() {
        let v = json!({"a": {"b": "1", "c": [true, null]}, "d": 2});
        assert_eq!(render(&v, Format::Text), "a.b: 1\na.c.0: true\na.c.1: -\nd: 2\n");
    }
}
