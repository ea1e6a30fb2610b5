//! Report rows and their JSON/CSV rendering.

use crate::params::{CliResult, Format, Params};
use serde::Serialize;
use serde_json::{Map, Value};
use std::fmt::Write as _;
use std::io::Write;

/// One checked statement: `observed <relation> bound`.
#[derive(Debug, Clone, Serialize)]
pub struct Assertion {
    pub suite: String,
    pub name: String,
    /// the statement the row checks, by role
    pub anchor: String,
    pub observed: f64,
    pub bound: f64,
    pub relation: &'static str,
    pub pass: bool,
    pub detail: String,
}

impl Assertion {
    /// `observed <= bound`.
    pub fn at_most(suite: &str, name: &str, anchor: &str, observed: f64, bound: f64) -> Self {
        Self {
            suite: suite.into(),
            name: name.into(),
            anchor: anchor.into(),
            observed,
            bound,
            relation: "<=",
            pass: observed <= bound,
            detail: String::new(),
        }
    }

    /// `observed >= bound`.
    pub fn at_least(suite: &str, name: &str, anchor: &str, observed: f64, bound: f64) -> Self {
        Self { relation: ">=", pass: observed >= bound, ..Self::at_most(suite, name, anchor, observed, bound) }
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = detail.into();
        self
    }
}

/// Formats a float with 17 significant digits; non-finite values become `null`.
pub fn float17(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        "null".into()
    }
}

fn write_value(out: &mut String, v: &Value) {
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if n.is_f64() {
                out.push_str(&float17(n.as_f64().unwrap_or(f64::NAN)));
            } else {
                let _ = write!(out, "{n}");
            }
        }
        Value::String(s) => out.push_str(&Value::String(s.clone()).to_string()),
        Value::Array(items) => {
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write_value(out, item);
            }
            out.push(']');
        }
        Value::Object(map) => {
            // serde_json's map is ordered by key
            out.push('{');
            for (i, (k, item)) in map.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                out.push_str(&Value::String(k.clone()).to_string());
                out.push(':');
                write_value(out, item);
            }
            out.push('}');
        }
    }
}

/// Compact JSON with sorted keys and 17-digit floats.
pub fn to_json(v: &Value) -> String {
    let mut s = String::new();
    write_value(&mut s, v);
    s.push('\n');
    s
}

/// FNV-1a digest of the canonical config echo, shown as 16 hex digits.
pub fn run_id(config: &Value) -> String {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for byte in to_json(config).bytes() {
        h ^= byte as u64;
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    format!("{h:016x}")
}

/// The resolved parameters as JSON, without the config path itself.
pub fn config_echo(command: &str, params: &Params) -> Value {
    let mut v = serde_json::to_value(params).unwrap_or(Value::Null);
    if let Value::Object(map) = &mut v {
        map.retain(|_, x| !x.is_null());
        map.insert("command".into(), Value::String(command.into()));
    }
    v
}

/// Wraps a command result with the config echo and run identifier.
pub fn envelope(command: &str, params: &Params, body: Value) -> Value {
    let config = config_echo(command, params);
    let mut map = Map::new();
    map.insert("run_id".into(), Value::String(run_id(&config)));
    map.insert("config".into(), config);
    map.insert("result".into(), body);
    Value::Object(map)
}

/// Header plus rows of already-formatted cells.
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&'static str]) -> Self {
        Self { header: header.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> CliResult<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header).map_err(csv_err)?;
        for r in &self.rows {
            w.write_record(r).map_err(csv_err)?;
        }
        let bytes = w.into_inner().map_err(|e| std::io::Error::other(e.to_string()))?;
        Ok(String::from_utf8_lossy(&bytes).into_owned())
    }
}

fn csv_err(e: csv::Error) -> std::io::Error {
    std::io::Error::other(e.to_string())
}

/// What a command hands back: a JSON body and, when it has one, a table.
pub struct Output {
    pub json: Value,
    pub table: Option<Table>,
}

/// Writes the output in the requested format to `--out` or stdout.
pub fn emit(command: &str, params: &Params, output: &Output) -> CliResult<()> {
    let text = match (params.format(), &output.table) {
        (Format::Csv, Some(t)) => t.to_csv()?,
        _ => to_json(&envelope(command, params, output.json.clone())),
    };
    match &params.out {
        Some(path) => std::fs::write(path, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}
