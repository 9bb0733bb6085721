//! Result tables, summaries and atomic output directories.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;

use crate::CliError;

pub const SUMMARY_FILE: &str = "summary.json";

/// Named table whose column headers carry units, e.g. `delta_phi[rad]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        debug_assert!(columns.iter().all(|c| c.ends_with(']') && c.contains('[')));
        Self { name: name.to_string(), columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> Result<Vec<u8>, CliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns).map_err(|e| CliError::Io(e.to_string()))?;
        for r in &self.rows {
            w.write_record(r).map_err(|e| CliError::Io(e.to_string()))?;
        }
        w.into_inner().map_err(|e| CliError::Io(e.to_string()))
    }

    pub fn file_name(&self) -> String {
        format!("{}.csv", self.name)
    }
}

/// Shortest round-trip decimal; exponent form outside [1e-4, 1e15).
pub fn num(v: f64) -> String {
    if v == 0.0 || !v.is_finite() || (1e-4..1e15).contains(&v.abs()) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

pub fn int<T: std::fmt::Display>(v: T) -> String {
    v.to_string()
}

/// Outcome of a named invariant checked after a run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: &str, passed: bool, detail: String) -> Self {
        Self { name: name.to_string(), passed, detail }
    }
}

/// Everything an experiment produces.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ResultBundle {
    pub tables: Vec<Table>,
    pub metrics: BTreeMap<String, Value>,
    pub checks: Vec<Check>,
}

impl ResultBundle {
    pub fn metric(&mut self, key: &str, value: impl Serialize) {
        self.metrics.insert(key.to_string(), serde_json::to_value(value).unwrap_or(Value::Null));
    }

    pub fn check(&mut self, name: &str, passed: bool, detail: String) {
        self.checks.push(Check::new(name, passed, detail));
    }

    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.name == name)
    }
}

/// Writes every file into a temporary sibling directory, then renames it to
/// `target`. A previous run's directory (one holding a summary) is replaced;
/// any other existing non-empty directory is refused.
pub fn write_atomically(target: &Path, files: &[(String, Vec<u8>)]) -> Result<PathBuf, CliError> {
    if target.exists() {
        let is_empty = std::fs::read_dir(target).map(|mut d| d.next().is_none()).unwrap_or(false);
        if !target.join(SUMMARY_FILE).is_file() && !is_empty {
            return Err(CliError::Config(format!(
                "{} exists and is not a previous run's output; refusing to overwrite",
                target.display()
            )));
        }
    }
    let parent = match target.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    std::fs::create_dir_all(&parent).map_err(|e| CliError::Io(format!("{}: {e}", parent.display())))?;
    let tmp = tempfile::Builder::new()
        .prefix(".qsensing-")
        .tempdir_in(&parent)
        .map_err(|e| CliError::Io(format!("{}: {e}", parent.display())))?;
    for (name, bytes) in files {
        std::fs::write(tmp.path().join(name), bytes).map_err(|e| CliError::Io(format!("{name}: {e}")))?;
    }
    if target.exists() {
        std::fs::remove_dir_all(target).map_err(|e| CliError::Io(format!("{}: {e}", target.display())))?;
    }
    let staged = tmp.keep();
    std::fs::rename(&staged, target).map_err(|e| {
        let _ = std::fs::remove_dir_all(&staged);
        CliError::Io(format!("{}: {e}", target.display()))
    })?;
    Ok(target.to_path_buf())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_format_round_trips() {
        for v in [0.0, 1.0, -2.5, 1e-20, 3.0e-15, 123456.789, 1e300] {
            assert_eq!(num(v).parse::<f64>().unwrap(), v);
        }
        assert_eq!(num(0.25), "0.25");
        assert_eq!(num(3e-15), "3e-15");
    }

    #[test]
    fn refuses_foreign_directory() {
        let dir = tempfile::tempdir().unwrap();
        let target = dir.path().join("out");
        std::fs::create_dir(&target).unwrap();
        std::fs::write(target.join("notes.txt"), "mine").unwrap();
        assert!(write_atomically(&target, &[("a.csv".into(), b"x[1]\n".to_vec())]).is_err());
        assert!(target.join("notes.txt").exists());
    }

    #[test]
    fn replaces_previous_run() {
        let dir = tempfile::tempdir().unwrap();
        let target = dir.path().join("out");
        write_atomically(&target, &[(SUMMARY_FILE.into(), b"{}".to_vec()), ("a.csv".into(), b"1".to_vec())]).unwrap();
        write_atomically(&target, &[(SUMMARY_FILE.into(), b"{}".to_vec())]).unwrap();
        assert!(!target.join("a.csv").exists());
        let leftovers: Vec<_> = std::fs::read_dir(dir.path()).unwrap().collect();
        assert_eq!(leftovers.len(), 1);
    }
}
