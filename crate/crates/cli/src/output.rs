//! Plain-text emission. Floats use Rust's `Display`, which prints the
//! shortest decimal that parses back to the same `f64`.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde_json::{Map, Value};

use crate::config::Format;
use crate::error::CliError;

pub fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents)
        .map_err(|e| CliError::Config(format!("cannot write {}: {e}", path.display())))
}

pub fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir)
        .map_err(|e| CliError::Config(format!("cannot create {}: {e}", dir.display())))
}

/// Numeric table with a fixed header.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(header: &[&'static str]) -> Self {
        Self {
            header: header.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            for (i, v) in row.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write!(out, "{v}").unwrap();
            }
            out.push('\n');
        }
        out
    }

    /// Array of objects keyed by the header; non-finite values become `null`.
    pub fn to_json(&self) -> String {
        let records: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let map: Map<String, Value> = self
                    .header
                    .iter()
                    .zip(row)
                    .map(|(k, &v)| (k.to_string(), number(v)))
                    .collect();
                Value::Object(map)
            })
            .collect();
        serde_json::to_string_pretty(&records).unwrap() + "\n"
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }

    /// Writes `<stem>.csv` or `<stem>.json` into `dir`.
    pub fn write(&self, dir: &Path, stem: &str, format: Format) -> Result<(), CliError> {
        let ext = match format {
            Format::Csv => "csv",
            Format::Json => "json",
        };
        write_file(&dir.join(format!("{stem}.{ext}")), &self.render(format))
    }
}

pub fn number(v: f64) -> Value {
    serde_json::Number::from_f64(v).map_or(Value::Null, Value::Number)
}

pub fn write_json(path: &Path, value: &Value) -> Result<(), CliError> {
    write_file(path, &(serde_json::to_string_pretty(value).unwrap() + "\n"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_uses_shortest_round_trip() {
        let mut t = Table::new(&["a", "b"]);
        t.push(vec![0.1 + 0.2, 3.2e7]);
        t.push(vec![1e-9, f64::NAN]);
        assert_eq!(
            t.to_csv(),
            "a,b\n0.30000000000000004,32000000\n0.000000001,NaN\n"
        );
        for line in t.to_csv().lines().skip(1).take(1) {
            let v: f64 = line.split(',').next().unwrap().parse().unwrap();
            assert_eq!(v, 0.1 + 0.2);
        }
    }

    #[test]
    fn json_records_follow_header() {
        let mut t = Table::new(&["x", "y"]);
        t.push(vec![1.5, f64::INFINITY]);
        let v: Value = serde_json::from_str(&t.to_json()).unwrap();
        assert_eq!(v[0]["x"], 1.5);
        assert!(v[0]["y"].is_null());
    }
}
