//! Versioned CSV and JSON tables.
//!
//! CSV output starts with a `#schema=v1` comment line; each table follows
//! as a `#table=<name>` comment, a header row and data rows. JSON output is
//! one object holding `meta` plus one array of row objects per table.
//! Floats are written in shortest round-trip form, so identical inputs give
//! byte-identical files.

use std::io::{self, BufWriter, Write};
use std::path::Path;

use serde_json::{Map, Value};

use crate::error::Result;

pub const SCHEMA_VERSION: &str = "v1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(u64),
    Float(f64),
    Text(String),
}

impl From<u32> for Cell {
    fn from(v: u32) -> Self {
        Cell::Int(u64::from(v))
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as u64)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_owned())
    }
}

impl Cell {
    fn csv_text(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            // Debug gives the shortest round-trip digits and switches to
            // exponent form for very small or large magnitudes
            Cell::Float(v) => format!("{v:?}"),
            Cell::Text(s) => s.clone(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(v) => Value::from(*v),
            Cell::Float(v) => serde_json::Number::from_f64(*v).map_or(Value::Null, Value::Number),
            Cell::Text(s) => Value::String(s.clone()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: &'static str,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new<S: Into<String>>(name: &'static str, columns: impl IntoIterator<Item = S>) -> Self {
        Table {
            name,
            columns: columns.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    /// Values of a float column, for contract checks.
    pub fn float_column(&self, name: &str) -> Option<Vec<f64>> {
        let idx = self.columns.iter().position(|c| c == name)?;
        self.rows
            .iter()
            .map(|r| match r[idx] {
                Cell::Float(v) => Some(v),
                Cell::Int(v) => Some(v as f64),
                Cell::Text(_) => None,
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub command: &'static str,
    pub parameters: Vec<(&'static str, Value)>,
    pub tables: Vec<Table>,
}

impl Report {
    pub fn new(command: &'static str) -> Self {
        Report {
            command,
            parameters: Vec::new(),
            tables: Vec::new(),
        }
    }

    pub fn param(&mut self, key: &'static str, value: impl Into<Value>) -> &mut Self {
        self.parameters.push((key, value.into()));
        self
    }

    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.name == name)
    }

    fn meta(&self) -> Value {
        let mut params = Map::new();
        for (k, v) in &self.parameters {
            params.insert((*k).to_owned(), v.clone());
        }
        let mut meta = Map::new();
        meta.insert("schema".into(), SCHEMA_VERSION.into());
        meta.insert("command".into(), self.command.into());
        meta.insert("parameters".into(), Value::Object(params));
        meta.insert("tool".into(), env!("CARGO_PKG_NAME").into());
        meta.insert("version".into(), env!("CARGO_PKG_VERSION").into());
        Value::Object(meta)
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "#schema={SCHEMA_VERSION} command={}", self.command)?;
        for table in &self.tables {
            writeln!(out, "#table={}", table.name)?;
            let mut w = csv::WriterBuilder::new()
                .flexible(false)
                .from_writer(&mut out);
            w.write_record(&table.columns)?;
            for row in &table.rows {
                w.write_record(row.iter().map(Cell::csv_text))?;
            }
            w.flush()?;
        }
        Ok(())
    }

    pub fn write_json<W: Write>(&self, out: W) -> io::Result<()> {
        let mut out = BufWriter::new(out);
        out.write_all(b"{\"meta\":")?;
        serde_json::to_writer(&mut out, &self.meta())?;
        for table in &self.tables {
            write!(out, ",{}:[", Value::String(table.name.into()))?;
            for (i, row) in table.rows.iter().enumerate() {
                if i > 0 {
                    out.write_all(b",")?;
                }
                let obj: Map<String, Value> = table
                    .columns
                    .iter()
                    .cloned()
                    .zip(row.iter().map(Cell::json))
                    .collect();
                serde_json::to_writer(&mut out, &obj)?;
            }
            out.write_all(b"]")?;
        }
        out.write_all(b"}\n")?;
        out.flush()
    }

    pub fn write_to<W: Write>(&self, format: Format, out: W) -> io::Result<()> {
        match format {
            Format::Csv => self.write_csv(out),
            Format::Json => self.write_json(out),
        }
    }

    /// Writes to `path` through a temporary file in the same directory that
    /// is renamed into place, or to stdout when no path is given.
    pub fn emit(&self, format: Format, path: Option<&Path>) -> Result<()> {
        match path {
            None => {
                let stdout = io::stdout();
                self.write_to(format, stdout.lock())?;
            }
            Some(path) => {
                let dir = match path.parent() {
                    Some(p) if !p.as_os_str().is_empty() => p,
                    _ => Path::new("."),
                };
                let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
                self.write_to(format, tmp.as_file_mut())?;
                tmp.as_file().sync_all()?;
                tmp.persist(path).map_err(|e| e.error)?;
            }
        }
        Ok(())
    }
}
