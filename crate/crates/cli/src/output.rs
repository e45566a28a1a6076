//! Tabular reports rendered as CSV or JSON.
//!
//! CSV: a `# {"command", "config", "meta"}` line, a header row, then one
//! row per record with floats in 17 significant digits. JSON: the same
//! header object plus `"records"`, one object per row.

use std::io::Write;

use serde_json::{Map, Value};

use crate::config::{Format, RunConfig};
use crate::error::CliError;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(u64),
    Float(f64),
    Text(String),
    Bool(bool),
    Empty,
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as u64)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Empty, Cell::Float)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_owned())
    }
}

/// Scientific notation with 17 significant digits; parses back exactly.
pub fn format_float(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        v.to_string()
    }
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) => format_float(*v),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(v) => Value::from(*v),
            Cell::Float(v) => serde_json::Number::from_f64(*v).map_or(Value::Null, Value::Number),
            Cell::Text(s) => Value::String(s.clone()),
            Cell::Bool(b) => Value::Bool(*b),
            Cell::Empty => Value::Null,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Report {
    pub config: RunConfig,
    pub meta: Map<String, Value>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Report {
    pub fn new(config: RunConfig, columns: Vec<String>) -> Self {
        Report { config, meta: Map::new(), columns, rows: Vec::new() }
    }

    fn header(&self) -> Value {
        let mut h = Map::new();
        h.insert("command".into(), Value::from(self.config.command.name()));
        h.insert("config".into(), serde_json::to_value(&self.config).expect("config serializes"));
        if !self.meta.is_empty() {
            h.insert("meta".into(), Value::Object(self.meta.clone()));
        }
        Value::Object(h)
    }

    pub fn to_json(&self) -> Value {
        let mut doc = match self.header() {
            Value::Object(m) => m,
            _ => unreachable!(),
        };
        let records = self
            .rows
            .iter()
            .map(|row| Value::Object(self.columns.iter().cloned().zip(row.iter().map(Cell::json)).collect()))
            .collect();
        doc.insert("records".into(), Value::Array(records));
        Value::Object(doc)
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<(), CliError> {
        writeln!(out, "# {}", self.header()).map_err(CliError::Output)?;
        let mut w = csv::Writer::from_writer(out);
        let io = |e: csv::Error| CliError::Output(e.into());
        w.write_record(&self.columns).map_err(io)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::csv)).map_err(io)?;
        }
        w.flush().map_err(CliError::Output)
    }

    pub fn render(&self) -> Result<Vec<u8>, CliError> {
        let mut buf = Vec::new();
        match self.config.format {
            Format::Csv => self.write_csv(&mut buf)?,
            Format::Json => {
                serde_json::to_writer_pretty(&mut buf, &self.to_json()).map_err(|e| CliError::Output(e.into()))?;
                buf.push(b'\n');
            }
        }
        Ok(buf)
    }

    /// Writes to `config.out`, or stdout when unset.
    pub fn emit(&self) -> Result<(), CliError> {
        let bytes = self.render()?;
        match &self.config.out {
            Some(path) => std::fs::write(path, bytes).map_err(CliError::Output),
            None => std::io::stdout().lock().write_all(&bytes).map_err(CliError::Output),
        }
    }
}
