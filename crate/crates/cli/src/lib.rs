//! Configuration-driven runner for the sensing experiments.
//!
//! `run_config` loads a TOML file, runs it and writes one CSV per table plus
//! `summary.json` into the output directory. Nothing is written on failure.

pub mod catalog;
pub mod config;
pub mod experiments;
pub mod output;

use std::path::{Path, PathBuf};

use serde_json::{json, Value};

pub use config::{ExperimentConfig, Kind, SCHEMA_VERSION};
pub use output::{ResultBundle, Table, SUMMARY_FILE};

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) => 1,
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

/// Command-line overrides applied on top of a configuration file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    /// Record the wall-clock time in the summary. Off by default so that
    /// repeated runs are byte-identical.
    pub stamp: bool,
}

pub const OUT_ENV: &str = "QSENSING_OUT";

fn resolve_output(config_path: &Path, cfg: &ExperimentConfig, ov: &Overrides) -> PathBuf {
    if let Some(p) = &ov.out {
        return p.clone();
    }
    if let Some(p) = &cfg.output {
        return if p.is_relative() {
            config_path.parent().map(|d| d.join(p)).unwrap_or_else(|| p.clone())
        } else {
            p.clone()
        };
    }
    let stem = config_path.file_stem().map(|s| s.to_os_string()).unwrap_or_else(|| "run".into());
    match std::env::var_os(OUT_ENV) {
        Some(base) if !base.is_empty() => PathBuf::from(base).join(stem),
        _ => PathBuf::from("results").join(stem),
    }
}

/// Runs the experiment and renders every output file, without touching disk.
pub fn render(cfg: &ExperimentConfig, stamp: bool) -> Result<(ResultBundle, Vec<(String, Vec<u8>)>), CliError> {
    let bundle = experiments::run(cfg)?;
    if let Some(c) = bundle.checks.iter().find(|c| !c.passed) {
        return Err(CliError::Numerical(format!("invariant violated: {} ({})", c.name, c.detail)));
    }
    let mut files = Vec::new();
    let mut tables = serde_json::Map::new();
    for t in &bundle.tables {
        files.push((t.file_name(), t.to_csv()?));
        tables.insert(t.name.clone(), json!({ "file": t.file_name(), "columns": t.columns, "rows": t.rows.len() }));
    }
    let params = experiments::resolved_params(cfg)?;
    let mut summary = json!({
        "schema_version": SCHEMA_VERSION,
        "kind": cfg.kind.name(),
        "seed": cfg.seed,
        "params": params,
        "tables": Value::Object(tables),
        "metrics": bundle.metrics,
        "checks": bundle.checks,
        "versions": { "qsensing": env!("CARGO_PKG_VERSION") },
    });
    if stamp {
        let secs = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        summary["timestamp_unix"] = json!(secs);
    }
    let mut text = serde_json::to_vec_pretty(&summary).map_err(|e| CliError::Io(e.to_string()))?;
    text.push(b'\n');
    files.push((SUMMARY_FILE.to_string(), text));
    Ok((bundle, files))
}

/// Loads, runs and writes one configuration. Returns the output directory.
pub fn run_config(path: &Path, ov: &Overrides) -> Result<(PathBuf, ResultBundle), CliError> {
    let mut cfg = ExperimentConfig::load(path)?;
    if ov.seed.is_some() {
        cfg.seed = ov.seed;
    }
    let target = resolve_output(path, &cfg, ov);
    let (bundle, files) = render(&cfg, ov.stamp)?;
    output::write_atomically(&target, &files)?;
    Ok((target, bundle))
}
