use std::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::io::InputError;

pub const TOOL: &str = "pseudoentropy";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Everything needed to reproduce a run and check that it was reproduced.
///
/// `timestamp` is taken from `SOURCE_DATE_EPOCH` when set and is otherwise empty, so
/// that the same command line always produces the same file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub tool: String,
    pub version: String,
    /// Arguments after the program name.
    pub command: Vec<String>,
    pub config: Value,
    pub seed: Option<u64>,
    pub timestamp: Option<u64>,
    pub exit_code: i32,
    pub outputs: Value,
}

impl RunRecord {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("records are plain JSON");
        s.push('\n');
        s
    }
}

pub fn timestamp() -> Option<u64> {
    std::env::var("SOURCE_DATE_EPOCH").ok()?.trim().parse().ok()
}

/// Result of a command that ran to completion.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub outputs: Value,
    pub seed: Option<u64>,
    /// `Some(false)` when the command checks a claim that turned out false.
    pub claim: Option<bool>,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        if self.claim == Some(false) {
            1
        } else {
            0
        }
    }
}

/// Why a command could not produce an outcome.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Input(InputError),
    Numeric(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Usage(_) | Failure::Input(_) => 2,
            Failure::Numeric(_) => 3,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(m) => write!(f, "usage error: {m}"),
            Failure::Input(e) => write!(f, "malformed input: {e}"),
            Failure::Numeric(m) => write!(f, "numeric failure: {m}"),
        }
    }
}

impl From<InputError> for Failure {
    fn from(e: InputError) -> Self {
        Failure::Input(e)
    }
}

impl From<pseudoentropy::Error> for Failure {
    fn from(e: pseudoentropy::Error) -> Self {
        if e.is_numeric() {
            Failure::Numeric(e.to_string())
        } else {
            Failure::Usage(e.to_string())
        }
    }
}

/// Longest array printed in full by the table renderer.
const INLINE_ARRAY: usize = 16;

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn flatten(prefix: &str, v: &Value, rows: &mut Vec<(String, String)>) {
    match v {
        Value::Object(map) => {
            for (key, inner) in map {
                let name = if prefix.is_empty() { key.clone() } else { format!("{prefix}.{key}") };
                flatten(&name, inner, rows);
            }
        }
        Value::Array(items) if items.iter().all(|i| !i.is_object()) => {
            let text = if items.len() <= INLINE_ARRAY {
                format!("[{}]", items.iter().map(scalar).collect::<Vec<_>>().join(", "))
            } else {
                format!("[{} entries]", items.len())
            };
            rows.push((prefix.to_string(), text));
        }
        Value::Array(items) => rows.push((prefix.to_string(), format!("[{} records]", items.len()))),
        other => rows.push((prefix.to_string(), scalar(other))),
    }
}

/// Two aligned columns, one row per leaf of `outputs`.
pub fn render_table(outputs: &Value) -> String {
    let mut rows = Vec::new();
    flatten("", outputs, &mut rows);
    let width = rows.iter().map(|(k, _)| k.chars().count()).max().unwrap_or(0);
    let mut out = String::new();
    for (key, value) in rows {
        writeln!(out, "{key:<width$}  {value}").unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn failures_map_to_exit_codes() {
        let numeric = Failure::from(pseudoentropy::Error::NoRoot { lo: 0.0, hi: 1.0, f_lo: 1.0, f_hi: 1.0 });
        assert_eq!(numeric.exit_code(), 3);
        assert_eq!(Failure::from(pseudoentropy::Error::Infeasible).exit_code(), 3);
        assert_eq!(Failure::from(pseudoentropy::Error::Domain("k".into())).exit_code(), 2);
        let outcome = Outcome { outputs: Value::Null, seed: None, claim: Some(false) };
        assert_eq!(outcome.exit_code(), 1);
        assert_eq!(Outcome { claim: None, ..outcome }.exit_code(), 0);
    }

    #[test]
    fn tables_flatten_nested_outputs() {
        let table = render_table(&json!({ "a": { "b": 1.5 }, "long": (0..20).collect::<Vec<_>>(), "short": [1, 2], "name": "x" }));
        let lines: Vec<&str> = table.lines().collect();
        assert_eq!(lines, ["a.b    1.5", "long   [20 entries]", "name   x", "short  [1, 2]"]);
    }
}
