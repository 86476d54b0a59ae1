// Copyright 2026 The adnoise Authors
// SPDX-License-Identifier: Apache-2.0

//! CSV output with a commented provenance header.

use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, ErrorKind, Result};

const MODULE: &str = "table";

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Real(f64),
    Text(String),
    Bool(bool),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Int(i) => i.to_string(),
            // nine significant digits
            Cell::Real(x) if x.is_finite() => format!("{x:.8e}"),
            Cell::Real(x) if x.is_nan() => "nan".into(),
            Cell::Real(x) => if *x > 0.0 { "inf" } else { "-inf" }.into(),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Real(x)
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
        Cell::Text(s.into())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Column {
    pub name: String,
    /// Empty for dimensionless or categorical columns.
    pub unit: String,
}

impl Column {
    pub fn new(name: &str, unit: &str) -> Self {
        Self {
            name: name.into(),
            unit: unit.into(),
        }
    }

    fn label(&self) -> String {
        if self.unit.is_empty() {
            self.name.clone()
        } else {
            format!("{} [{}]", self.name, self.unit)
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    /// File stem.
    pub name: String,
    pub columns: Vec<Column>,
    pub rows: Vec<Vec<Cell>>,
    /// Extra `#` lines written after the provenance block.
    pub notes: Vec<String>,
}

impl Table {
    pub fn new(name: &str, columns: Vec<Column>) -> Self {
        Self {
            name: name.into(),
            columns,
            rows: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        self.rows.push(row);
    }

    pub fn note(&mut self, line: impl Into<String>) {
        self.notes.push(line.into());
    }

    /// Index of the column called `name`.
    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c.name == name)
    }

    /// Numeric column as f64; non-numeric cells are NaN.
    pub fn real_column(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.column(name)?;
        Some(
            self.rows
                .iter()
                .map(|r| match r[k] {
                    Cell::Real(x) => x,
                    Cell::Int(i) => i as f64,
                    _ => f64::NAN,
                })
                .collect(),
        )
    }
}

/// Provenance written at the top of every file.
#[derive(Debug, Clone, PartialEq)]
pub struct Header {
    pub version: String,
    pub command: String,
    pub seed: u64,
    /// Resolved configuration as TOML.
    pub config: String,
}

pub fn render_table(table: &Table, header: &Header) -> Result<String> {
    let width = table.columns.len();
    if let Some(k) = table.rows.iter().position(|r| r.len() != width) {
        return Err(Error::new(
            ErrorKind::Io,
            MODULE,
            format!("{}: row {k} has {} cells, expected {width}", table.name, table.rows[k].len()),
        ));
    }
    let mut out = String::new();
    out.push_str(&format!("# adnoise {}\n", header.version));
    out.push_str(&format!("# command: {}\n", header.command));
    out.push_str(&format!("# seed: {}\n", header.seed));
    out.push_str("# config:\n");
    for line in header.config.lines() {
        out.push_str("#   ");
        out.push_str(line);
        out.push('\n');
    }
    for note in &table.notes {
        out.push_str("# ");
        out.push_str(note);
        out.push('\n');
    }
    let mut w = csv::WriterBuilder::new().from_writer(Vec::new());
    let csv_err = |e: csv::Error| Error::new(ErrorKind::Io, MODULE, e.to_string());
    w.write_record(table.columns.iter().map(Column::label)).map_err(csv_err)?;
    for row in &table.rows {
        w.write_record(row.iter().map(Cell::render)).map_err(csv_err)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| Error::new(ErrorKind::Io, MODULE, e.to_string()))?;
    out.push_str(&String::from_utf8(bytes).expect("csv output is utf-8"));
    Ok(out)
}

/// Write `<dir>/<name>.csv`, creating `dir` if needed.
pub fn emit_table(table: &Table, header: &Header, dir: &Path) -> Result<PathBuf> {
    let text = render_table(table, header)?;
    fs::create_dir_all(dir).map_err(|e| Error::new(ErrorKind::Io, MODULE, format!("{}: {e}", dir.display())))?;
    let path = dir.join(format!("{}.csv", table.name));
    fs::write(&path, text).map_err(|e| Error::new(ErrorKind::Io, MODULE, format!("{}: {e}", path.display())))?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn header() -> Header {
        Header {
            version: "0.0.0".into(),
            command: "test".into(),
            seed: 7,
            config: "preset = \"Ne-Au\"\n[solver]\nn_points = 4000\n".into(),
        }
    }

    fn sample() -> Table {
        let mut t = Table::new("demo", vec![Column::new("omega", "1/s"), Column::new("label", "")]);
        t.push(vec![Cell::Real(1.0 / 3.0), "a,b".into()]);
        t.push(vec![Cell::Real(-2.5e-30), "say \"hi\"".into()]);
        t
    }

    #[test]
    fn header_only_when_empty() {
        let t = Table::new("empty", vec![Column::new("x", "m")]);
        let s = render_table(&t, &header()).unwrap();
        let data: Vec<&str> = s.lines().filter(|l| !l.starts_with('#')).collect();
        assert_eq!(data, vec!["x [m]"]);
        assert!(s.contains("#   n_points = 4000"));
    }

    #[test]
    fn quoting_and_digits() {
        let s = render_table(&sample(), &header()).unwrap();
        let data: Vec<&str> = s.lines().filter(|l| !l.starts_with('#')).collect();
        assert_eq!(data[0], "omega [1/s],label");
        assert_eq!(data[1], "3.33333333e-1,\"a,b\"");
        assert_eq!(data[2], "-2.50000000e-30,\"say \"\"hi\"\"\"");
    }

    #[test]
    fn units_appear_once_per_column() {
        let s = render_table(&sample(), &header()).unwrap();
        let data: Vec<&str> = s.lines().filter(|l| !l.starts_with('#')).collect();
        assert_eq!(data.iter().filter(|l| l.contains("[1/s]")).count(), 1);
    }

    #[test]
    fn ragged_rows_rejected() {
        let mut t = sample();
        t.push(vec![Cell::Int(1)]);
        assert!(render_table(&t, &header()).is_err());
    }

    #[test]
    fn deterministic_files() {
        let dir = tempfile::tempdir().unwrap();
        let a = fs::read(emit_table(&sample(), &header(), &dir.path().join("a")).unwrap()).unwrap();
        let b = fs::read(emit_table(&sample(), &header(), &dir.path().join("b")).unwrap()).unwrap();
        assert_eq!(a, b);
    }
}
