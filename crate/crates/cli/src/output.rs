//! Tabular output as CSV or JSON.
//!
//! CSV files start with `#` comment lines carrying the tool version, the
//! resolved configuration and the provenance of each column; floats are
//! written with 17 significant digits. JSON carries the same rows plus a
//! `metadata` object.

use std::collections::BTreeMap;
use std::io::Write;

use serde::Serialize;
use serde_json::{json, Value};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// Where a value comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    Exact,
    Asymptotic,
    PaperConstant,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) => format!("{v:.16e}"),
            Cell::Text(s) => s.clone(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(v) => json!(v),
            Cell::Float(v) => json!(v),
            Cell::Text(s) => json!(s),
        }
    }
}

impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Cell::Int(v)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

/// One result table with everything needed to reproduce it.
#[derive(Debug, Clone)]
pub struct Document {
    pub command: &'static str,
    pub config: Value,
    pub columns: Vec<String>,
    /// Provenance for each value column.
    pub provenance: BTreeMap<String, Provenance>,
    pub rows: Vec<Vec<Cell>>,
}

impl Document {
    pub fn new(command: &'static str, config: &impl Serialize, columns: &[&str]) -> Self {
        Self {
            command,
            config: serde_json::to_value(config).expect("configs serialize"),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            provenance: BTreeMap::new(),
            rows: Vec::new(),
        }
    }

    pub fn tag(&mut self, column: &str, p: Provenance) {
        self.provenance.insert(column.to_string(), p);
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    fn metadata(&self) -> Value {
        json!({
            "tool": "xxchain",
            "version": VERSION,
            "command": self.command,
            "config": self.config,
            "provenance": self.provenance,
        })
    }

    pub fn write(&self, format: Format, out: &mut dyn Write) -> std::io::Result<()> {
        match format {
            Format::Csv => self.write_csv(out),
            Format::Json => self.write_json(out),
        }
    }

    fn write_csv(&self, out: &mut dyn Write) -> std::io::Result<()> {
        writeln!(out, "# xxchain {VERSION} {}", self.command)?;
        writeln!(out, "# config: {}", self.config)?;
        writeln!(out, "# provenance: {}", serde_json::to_string(&self.provenance)?)?;
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::csv))?;
        }
        w.flush()?;
        Ok(())
    }

    fn write_json(&self, out: &mut dyn Write) -> std::io::Result<()> {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| Value::Object(self.columns.iter().cloned().zip(r.iter().map(Cell::json)).collect()))
            .collect();
        let doc = json!({
            "metadata": self.metadata(),
            "columns": self.columns,
            "rows": rows,
        });
        serde_json::to_writer_pretty(&mut *out, &doc)?;
        writeln!(out)?;
        Ok(())
    }
}
