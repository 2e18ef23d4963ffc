//! The machine-readable record envelope and its two encodings.
//!
//! Every command prints one or more [`OutputRecord`]s. The default encoding
//! is one JSON object per line; `--format csv` flattens the records into a
//! table with one row per record. Floats go through `serde_json`, whose
//! shortest round-trip formatting reproduces every `f64` bit-exactly.

use std::io::Write;
use std::time::Duration;

use clap::ValueEnum;
use serde::Serialize;
use serde_json::{Map, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    /// One JSON object per line.
    Json,
    /// A header row, then one row per record; `timing` is omitted.
    Csv,
}

/// One printed record.
///
/// `inputs` and `results` are flat maps of named values; estimated
/// quantities carry a sibling `<name>_error` field. `timing` is the only
/// field that may differ between identical invocations.
#[derive(Debug, Clone, Serialize)]
pub struct OutputRecord {
    pub command: String,
    /// The arguments the command was invoked with, after the program name.
    pub argv: Vec<String>,
    pub inputs: Map<String, Value>,
    pub results: Map<String, Value>,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub timing: Timing,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    /// The computation finished; no claim was checked.
    Ok,
    /// A checked statement held within its budget.
    Pass,
    /// A checked statement was violated.
    Fail,
    /// The check does not apply to this input.
    Skipped,
    /// The computation failed; see `error`.
    Error,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Timing {
    pub elapsed_seconds: f64,
}

impl Timing {
    pub fn from(elapsed: Duration) -> Self {
        Timing {
            elapsed_seconds: elapsed.as_secs_f64(),
        }
    }
}

/// Builder for the `inputs` / `results` maps.
#[derive(Debug, Default)]
pub struct Fields(Map<String, Value>);

impl Fields {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn put(mut self, key: &str, value: impl Serialize) -> Self {
        self.set(key, value);
        self
    }

    pub fn set(&mut self, key: &str, value: impl Serialize) {
        let value = serde_json::to_value(value).expect("plain data always serializes");
        self.0.insert(key.to_string(), value);
    }

    /// `key` and `key_error`.
    pub fn estimate(mut self, key: &str, value: f64, error: f64) -> Self {
        self.set(key, value);
        self.set(&format!("{key}_error"), error);
        self
    }

    pub fn into_map(self) -> Map<String, Value> {
        self.0
    }
}

/// Writes `records` in the requested encoding.
pub fn emit(records: &[OutputRecord], format: Format, out: &mut impl Write) -> std::io::Result<()> {
    match format {
        Format::Json => {
            for r in records {
                serde_json::to_writer(&mut *out, r)?;
                writeln!(out)?;
            }
        }
        Format::Csv => write_csv(records, out)?,
    }
    out.flush()
}

/// Columns: `command`, `status`, `error`, then every input and result key in
/// first-seen order. Keys missing from a row are left empty; non-scalar
/// values are embedded as JSON.
fn write_csv(records: &[OutputRecord], out: &mut impl Write) -> std::io::Result<()> {
    let mut columns: Vec<String> = Vec::new();
    for r in records {
        for key in r.inputs.keys().chain(r.results.keys()) {
            if !columns.contains(key) {
                columns.push(key.clone());
            }
        }
    }
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["command".to_string(), "status".to_string(), "error".to_string()];
    header.extend(columns.iter().cloned());
    w.write_record(&header)?;
    for r in records {
        let mut row = vec![
            r.command.clone(),
            cell(&serde_json::to_value(r.status).expect("status serializes")),
            r.error.clone().unwrap_or_default(),
        ];
        for key in &columns {
            let v = r.results.get(key).or_else(|| r.inputs.get(key));
            row.push(v.map(cell).unwrap_or_default());
        }
        w.write_record(&row)?;
    }
    w.flush()
}

fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}
