//! Tables and their CSV/JSON serialization, plus the metadata sidecar.

use std::fs::File;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use serde::Serialize;
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// Column-oriented result of one subcommand. Column names carry units.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
    /// Subcommand-specific metadata (summary scalars, stop markers).
    pub extra: Map<String, Value>,
}

impl Table {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Self {
            columns: columns.into_iter().map(Into::into).collect(),
            ..Self::default()
        }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    fn write_csv<W: Write>(&self, out: W) -> io::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(cell))?;
        }
        w.flush()
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// Number cell; non-finite values become empty cells.
pub fn num(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
}

pub fn opt(x: Option<f64>) -> Value {
    x.map_or(Value::Null, num)
}

/// Metadata recorded with every run. Holds no timestamps or host details so
/// that identical configurations produce identical bytes.
pub fn metadata(subcommand: &str, config: &Value, seed: u64, extra: &Map<String, Value>) -> Value {
    let canonical = serde_json::to_string(config).expect("config serializes");
    let hash = Sha256::digest(canonical.as_bytes());
    let hex: String = hash.iter().map(|b| format!("{b:02x}")).collect();
    json!({
        "tool": "finlim",
        "version": env!("CARGO_PKG_VERSION"),
        "subcommand": subcommand,
        "seed": seed,
        "config_hash": hex,
        "config": config,
        "results": extra,
    })
}

pub fn sidecar_path(out: &Path) -> PathBuf {
    let mut name = out.file_name().unwrap_or_default().to_os_string();
    name.push(".meta.json");
    out.with_file_name(name)
}

/// Writes the table to `out` (stdout when `None`). CSV output gets a JSON
/// sidecar next to the file; JSON output embeds the metadata.
pub fn emit(table: &Table, meta: Value, format: Format, out: Option<&Path>) -> io::Result<()> {
    match format {
        Format::Csv => match out {
            Some(path) => {
                table.write_csv(File::create(path)?)?;
                let mut f = File::create(sidecar_path(path))?;
                serde_json::to_writer_pretty(&mut f, &meta)?;
                f.write_all(b"\n")
            }
            None => table.write_csv(io::stdout().lock()),
        },
        Format::Json => {
            let rows: Vec<Value> = table
                .rows
                .iter()
                .map(|r| {
                    Value::Object(
                        table
                            .columns
                            .iter()
                            .cloned()
                            .zip(r.iter().cloned())
                            .collect(),
                    )
                })
                .collect();
            let doc = json!({ "metadata": meta, "columns": table.columns, "rows": rows });
            let mut text = serde_json::to_string_pretty(&doc)?;
            text.push('\n');
            match out {
                Some(path) => std::fs::write(path, text),
                None => io::stdout().lock().write_all(text.as_bytes()),
            }
        }
    }
}
