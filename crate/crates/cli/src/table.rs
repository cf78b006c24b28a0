//! Tabular results and their CSV / JSON encodings.

use std::fmt::Write as _;

use clap::ValueEnum;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Naming {
    #[default]
    Canonical,
    Electrical,
}

impl Naming {
    /// Column name for a canonical coordinate name; other names pass through.
    pub fn column(self, name: &str) -> String {
        match (self, name) {
            (Naming::Electrical, "q") => "I_L1".into(),
            (Naming::Electrical, "p") => "V_C1".into(),
            (Naming::Electrical, "Q") => "I_L2".into(),
            (Naming::Electrical, "P") => "V_C2".into(),
            _ => name.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Bool(bool),
    Text(String),
    Null,
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Null, Cell::Num)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.into())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl Cell {
    fn csv(&self, out: &mut String) {
        match self {
            // 17 significant digits round-trip every double
            Cell::Num(v) if v.is_finite() => write!(out, "{v:.16e}").unwrap(),
            Cell::Num(v) => write!(out, "{v}").unwrap(),
            Cell::Int(v) => write!(out, "{v}").unwrap(),
            Cell::Bool(v) => write!(out, "{v}").unwrap(),
            Cell::Text(s) => out.push_str(s),
            Cell::Null => {}
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            Cell::Num(v) => serde_json::Number::from_f64(*v).map_or(Value::Null, Value::Number),
            Cell::Int(v) => Value::from(*v),
            Cell::Bool(v) => Value::Bool(*v),
            Cell::Text(s) => Value::String(s.clone()),
            Cell::Null => Value::Null,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self { columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn renamed(mut self, naming: Naming) -> Self {
        self.columns = self.columns.iter().map(|c| naming.column(c)).collect();
        self
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            for (k, cell) in row.iter().enumerate() {
                if k > 0 {
                    out.push(',');
                }
                cell.csv(&mut out);
            }
            out.push('\n');
        }
        out
    }

    pub fn row_object(&self, k: usize) -> Map<String, Value> {
        self.columns.iter().cloned().zip(self.rows[k].iter().map(Cell::to_json)).collect()
    }

    /// An array of row objects, or the single object when `scalar`.
    pub fn to_json(&self, scalar: bool) -> Value {
        if scalar && self.rows.len() == 1 {
            Value::Object(self.row_object(0))
        } else {
            Value::Array((0..self.rows.len()).map(|k| Value::Object(self.row_object(k))).collect())
        }
    }

    pub fn encode(&self, format: Format, scalar: bool) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => {
                let mut s = serde_json::to_string(&self.to_json(scalar)).expect("json encoding");
                s.push('\n');
                s
            }
        }
    }
}
