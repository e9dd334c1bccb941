//! Result tables. CSV is the canonical form; JSON mirrors it cell for cell.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

/// One table cell. Floats are written in Rust's round-trip debug form, which
/// always carries a `.` or exponent, so a CSV cell parses back to the same
/// variant. Text cells produced by the runners never look numeric.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
    Empty,
}

impl Cell {
    pub fn parse(s: &str) -> Cell {
        if s.is_empty() {
            return Cell::Empty;
        }
        let digits = s.strip_prefix('-').unwrap_or(s);
        if !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit()) {
            if let Ok(i) = s.parse() {
                return Cell::Int(i);
            }
        }
        match s.parse::<f64>() {
            Ok(f) => Cell::Float(f),
            Err(_) => Cell::Text(s.to_string()),
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match *self {
            Cell::Int(i) => Some(i as f64),
            Cell::Float(f) => Some(f),
            _ => None,
        }
    }

    /// Space-separated list in brackets, e.g. `[1 3 5]`.
    pub fn list<I: IntoIterator<Item = T>, T: fmt::Display>(items: I) -> Cell {
        let parts: Vec<String> = items.into_iter().map(|x| x.to_string()).collect();
        Cell::Text(format!("[{}]", parts.join(" ")))
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cell::Int(i) => write!(f, "{i}"),
            Cell::Float(x) => write!(f, "{x:?}"),
            Cell::Text(s) => f.write_str(s),
            Cell::Empty => Ok(()),
        }
    }
}

impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Cell::Int(v)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Int(v as i64)
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

impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(v: Option<T>) -> Self {
        v.map_or(Cell::Empty, Into::into)
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Provenance {
    pub command: String,
    pub config_hash: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub config_path: Option<String>,
    pub seeds: Vec<u64>,
    pub version: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultTable {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    #[serde(default)]
    pub provenance: Provenance,
}

impl ResultTable {
    pub fn new(columns: Vec<String>, provenance: Provenance) -> Self {
        Self {
            columns,
            rows: Vec::new(),
            provenance,
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(
            row.len(),
            self.columns.len(),
            "row width must match the header"
        );
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn cell(&self, row: usize, name: &str) -> Option<&Cell> {
        self.column(name)
            .and_then(|c| self.rows.get(row).map(|r| &r[c]))
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns).expect("in-memory write");
        for row in &self.rows {
            w.write_record(row.iter().map(|c| c.to_string()))
                .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 output")
    }

    /// Parses CSV produced by [`ResultTable::to_csv`]. The provenance note
    /// only lives in the JSON form and comes back empty.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut r = csv::Reader::from_reader(text.as_bytes());
        let columns: Vec<String> = r
            .headers()
            .map_err(|e| CliError::Table(e.to_string()))?
            .iter()
            .map(str::to_string)
            .collect();
        let mut table = ResultTable::new(columns, Provenance::default());
        for rec in r.records() {
            let rec = rec.map_err(|e| CliError::Table(e.to_string()))?;
            table.rows.push(rec.iter().map(Cell::parse).collect());
        }
        Ok(table)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("table serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let table: ResultTable =
            serde_json::from_str(text).map_err(|e| CliError::Table(e.to_string()))?;
        if table.rows.iter().any(|r| r.len() != table.columns.len()) {
            return Err(CliError::Table("row width differs from header".into()));
        }
        Ok(table)
    }
}
