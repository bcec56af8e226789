//! Deterministic CSV and JSON rendering. Reals are written with 17
//! significant digits; non-finite reals become `NaN`/`inf` in CSV and null in
//! JSON.

use std::io::Write;

use serde_json::{Map, Number, Value};

use crate::config::Format;
use crate::CliError;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Real(f64),
    Text(String),
    Bool(bool),
    List(Vec<Cell>),
    Null,
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Real(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_owned())
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<u32> for Cell {
    fn from(v: u32) -> Self {
        Cell::Int(i64::from(v))
    }
}

pub fn real_text(v: f64) -> String {
    format!("{v:.16e}")
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(i) => i.to_string(),
            Cell::Real(v) if v.is_finite() => real_text(*v),
            Cell::Real(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
            Cell::List(items) => items.iter().map(Cell::csv).collect::<Vec<_>>().join(";"),
            Cell::Null => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(i) => Value::from(*i),
            Cell::Real(v) if v.is_finite() => {
                Value::Number(real_text(*v).parse::<Number>().expect("formatted real is a JSON number"))
            }
            Cell::Real(_) | Cell::Null => Value::Null,
            Cell::Text(s) => Value::String(s.clone()),
            Cell::Bool(b) => Value::Bool(*b),
            Cell::List(items) => Value::Array(items.iter().map(Cell::json).collect()),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Table {
    /// JSON key of the row array.
    pub name: &'static str,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: &'static str, columns: &[&'static str]) -> Self {
        Self { name, columns: columns.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

#[derive(Debug, Clone)]
pub struct Report {
    pub command: &'static str,
    pub metadata: Vec<(&'static str, String)>,
    /// Extra top-level JSON fields.
    pub summary: Vec<(&'static str, Cell)>,
    pub tables: Vec<Table>,
    /// Which table CSV output carries.
    pub csv_table: usize,
}

impl Report {
    pub fn new(command: &'static str, metadata: Vec<(&'static str, String)>) -> Self {
        Self { command, metadata, summary: Vec::new(), tables: Vec::new(), csv_table: 0 }
    }

    pub fn render(&self, format: Format) -> Result<Vec<u8>, CliError> {
        match format {
            Format::Csv => self.csv(),
            Format::Json => self.json(),
        }
    }

    fn csv(&self) -> Result<Vec<u8>, CliError> {
        let table = &self.tables[self.csv_table];
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&table.columns)?;
        for row in &table.rows {
            w.write_record(row.iter().map(Cell::csv))?;
        }
        let mut out = w.into_inner().map_err(|e| CliError::Io(e.into_error()))?;
        let mut meta = format!("# painleve-spectra {} {}", env!("CARGO_PKG_VERSION"), self.command);
        for (k, v) in &self.metadata {
            meta.push_str(&format!(" {k}={v}"));
        }
        for (k, v) in &self.summary {
            meta.push_str(&format!(" {k}={}", v.csv()));
        }
        writeln!(out, "{meta}")?;
        Ok(out)
    }

    fn json(&self) -> Result<Vec<u8>, CliError> {
        let mut top = Map::new();
        top.insert("schema_version".into(), Value::from(1));
        top.insert("command".into(), Value::from(self.command));
        let meta: Map<String, Value> =
            self.metadata.iter().map(|(k, v)| ((*k).to_owned(), Value::from(v.as_str()))).collect();
        top.insert("metadata".into(), Value::Object(meta));
        for (k, v) in &self.summary {
            top.insert((*k).to_owned(), v.json());
        }
        for t in &self.tables {
            let rows = t
                .rows
                .iter()
                .map(|r| {
                    let obj: Map<String, Value> =
                        t.columns.iter().zip(r).map(|(c, v)| ((*c).to_owned(), v.json())).collect();
                    Value::Object(obj)
                })
                .collect();
            top.insert(t.name.to_owned(), Value::Array(rows));
        }
        let mut out = serde_json::to_vec_pretty(&Value::Object(top))?;
        out.push(b'\n');
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Report {
        let mut t = Table::new("rows", &["name", "value", "list"]);
        t.push(vec!["a,b".into(), (1.0 / 3.0).into(), Cell::List(vec![Cell::Int(0), Cell::Int(1)])]);
        t.push(vec!["nan".into(), f64::NAN.into(), Cell::List(vec![])]);
        let mut r = Report::new("test", vec![("k", "v".into())]);
        r.tables.push(t);
        r
    }

    #[test]
    fn csv_layout() {
        let s = String::from_utf8(sample().render(Format::Csv).unwrap()).unwrap();
        let lines: Vec<&str> = s.lines().collect();
        assert_eq!(lines[0], "name,value,list");
        assert_eq!(lines[1], "\"a,b\",3.3333333333333331e-1,0;1");
        assert_eq!(lines[2], "nan,NaN,");
        assert!(lines[3].starts_with("# painleve-spectra") && lines[3].ends_with("test k=v"));
    }

    #[test]
    fn json_keeps_seventeen_digits_and_order() {
        let s = String::from_utf8(sample().render(Format::Json).unwrap()).unwrap();
        assert!(s.contains("3.3333333333333331e-1"));
        assert!(s.find("schema_version").unwrap() < s.find("command").unwrap());
        let v: Value = serde_json::from_str(&s).unwrap();
        assert_eq!(v["schema_version"], 1);
        assert!(v["rows"][1]["value"].is_null());
        assert_eq!(v["rows"][0]["list"][1], 1);
    }
}
