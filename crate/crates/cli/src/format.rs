//! Record tables and their CSV and JSON encodings.

use std::io::Write;

use clap::ValueEnum;
use serde_json::{json, Map, Value};

use crate::error::CliError;

pub const SCHEMA_VERSION: u32 = 1;
pub const CSV_SIGNIFICANT_DIGITS: usize = 12;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Float(f64),
    Int(i64),
    Bool(bool),
    Text(String),
    Floats(Vec<f64>),
}

impl Cell {
    fn csv_text(&self) -> String {
        match self {
            Cell::Float(x) => format_g(*x, CSV_SIGNIFICANT_DIGITS),
            Cell::Int(i) => i.to_string(),
            Cell::Bool(b) => b.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Floats(xs) => xs
                .iter()
                .map(|&x| format_g(x, CSV_SIGNIFICANT_DIGITS))
                .collect::<Vec<_>>()
                .join(";"),
        }
    }

    fn json_value(&self) -> Value {
        match self {
            Cell::Float(x) => json!(x),
            Cell::Int(i) => json!(i),
            Cell::Bool(b) => json!(b),
            Cell::Text(s) => json!(s),
            Cell::Floats(xs) => json!(xs),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Float(x)
    }
}

impl From<usize> for Cell {
    fn from(i: usize) -> Self {
        Cell::Int(i as i64)
    }
}

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Cell::Bool(b)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_owned())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

impl From<Vec<f64>> for Cell {
    fn from(xs: Vec<f64>) -> Self {
        Cell::Floats(xs)
    }
}

/// One output row; columns keep insertion order.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Record {
    cells: Vec<(&'static str, Cell)>,
}

impl Record {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, name: &'static str, value: impl Into<Cell>) -> Self {
        self.cells.push((name, value.into()));
        self
    }

    pub fn push(&mut self, name: &'static str, value: impl Into<Cell>) {
        self.cells.push((name, value.into()));
    }

    #[cfg(test)]
    pub fn get(&self, name: &str) -> Option<&Cell> {
        self.cells.iter().find(|(n, _)| *n == name).map(|(_, c)| c)
    }

    fn columns(&self) -> Vec<&'static str> {
        self.cells.iter().map(|(n, _)| *n).collect()
    }
}

/// Rows sharing one column layout, tagged with the producing command.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub command: String,
    pub records: Vec<Record>,
}

impl Table {
    pub fn new(command: impl Into<String>, records: Vec<Record>) -> Self {
        Self {
            command: command.into(),
            records,
        }
    }

    pub fn render(&self, format: Format) -> Result<String, CliError> {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => Ok(self.to_json()),
        }
    }

    pub fn to_csv(&self) -> Result<String, CliError> {
        let mut writer = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        if let Some(first) = self.records.first() {
            let header = first.columns();
            writer.write_record(&header)?;
            for rec in &self.records {
                if rec.columns() != header {
                    return Err(CliError::Internal("records with differing columns".into()));
                }
                writer.write_record(rec.cells.iter().map(|(_, c)| c.csv_text()))?;
            }
        }
        let bytes = writer
            .into_inner()
            .map_err(|e| CliError::Internal(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| CliError::Internal(e.to_string()))
    }

    pub fn to_json_value(&self) -> Value {
        let records: Vec<Value> = self
            .records
            .iter()
            .map(|r| {
                let mut obj = Map::new();
                obj.insert("schema_version".into(), json!(SCHEMA_VERSION));
                for (name, cell) in &r.cells {
                    obj.insert((*name).into(), cell.json_value());
                }
                Value::Object(obj)
            })
            .collect();
        json!({
            "schema_version": SCHEMA_VERSION,
            "command": self.command,
            "records": records,
        })
    }

    pub fn to_json(&self) -> String {
        reformat_json(&self.to_json_value())
    }
}

/// Canonical text form of a JSON document: pretty printed with a trailing newline.
pub fn reformat_json(value: &Value) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("JSON values always serialize");
    text.push('\n');
    text
}

/// `printf("%.{digits}g")` formatting.
pub fn format_g(x: f64, digits: usize) -> String {
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let digits = digits.max(1);
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= digits as i32 {
        let mantissa = trim_fraction(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_fraction(&format!("{:.*}", decimals, x)).to_owned()
    }
}

fn trim_fraction(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Writes `text` to `path`, or to stdout when no path is given.
pub fn emit(text: &str, path: Option<&std::path::Path>) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::Io(p.display().to_string(), e)),
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            lock.write_all(text.as_bytes())
                .and_then(|_| lock.flush())
                .map_err(|e| CliError::Io("stdout".into(), e))
        }
    }
}
