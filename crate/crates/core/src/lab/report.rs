//! CSV tables and the JSON summary.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::LabError;

/// Shortest representation that parses back to the same `f64`, switching
/// to exponent notation for very large or small magnitudes.
pub fn fmt_f64(v: f64) -> String {
    if v.is_finite() {
        serde_json::Value::from(v).to_string()
    } else {
        format!("{v}")
    }
}

/// A named CSV table with a fixed header.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: &str, header: &[&str]) -> Self {
        Self { name: name.into(), header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len(), "row width");
        self.rows.push(row);
    }

    pub fn write(&self, path: &Path) -> Result<(), LabError> {
        let err = |source| LabError::Csv { path: path.to_path_buf(), source };
        let mut w = csv::Writer::from_path(path).map_err(err)?;
        w.write_record(&self.header).map_err(err)?;
        for r in &self.rows {
            w.write_record(r).map_err(err)?;
        }
        w.flush().map_err(|source| LabError::Io { path: path.to_path_buf(), source })
    }
}

/// Writes `<dir>/<name>.csv` for every table and `<dir>/summary.json`,
/// creating `dir` if needed. Returns the written paths.
pub fn emit_report(dir: &Path, tables: &[Table], summary: &impl Serialize) -> Result<Vec<PathBuf>, LabError> {
    if dir.exists() && !dir.is_dir() {
        return Err(LabError::Io {
            path: dir.to_path_buf(),
            source: std::io::Error::new(std::io::ErrorKind::AlreadyExists, "output path exists and is not a directory"),
        });
    }
    fs::create_dir_all(dir).map_err(|source| LabError::Io { path: dir.to_path_buf(), source })?;
    let mut out = Vec::new();
    for t in tables {
        let path = dir.join(format!("{}.csv", t.name));
        t.write(&path)?;
        out.push(path);
    }
    let path = dir.join("summary.json");
    let mut text = serde_json::to_string_pretty(summary).map_err(|source| LabError::Json { path: path.clone(), source })?;
    text.push('\n');
    fs::write(&path, text).map_err(|source| LabError::Io { path: path.clone(), source })?;
    out.push(path);
    Ok(out)
}
