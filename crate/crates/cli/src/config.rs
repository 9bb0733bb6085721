//! Experiment configuration files.

use std::path::{Path, PathBuf};

use serde::{de::DeserializeOwned, Deserialize, Serialize};

use crate::CliError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    SqlScaling,
    HeisenbergScaling,
    Angular,
    Spiral,
    Doppler,
    Dispersion,
    Ramsey,
}

impl Kind {
    pub const ALL: [Kind; 7] = [
        Kind::SqlScaling,
        Kind::HeisenbergScaling,
        Kind::Angular,
        Kind::Spiral,
        Kind::Doppler,
        Kind::Dispersion,
        Kind::Ramsey,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Kind::SqlScaling => "sql-scaling",
            Kind::HeisenbergScaling => "heisenberg-scaling",
            Kind::Angular => "angular",
            Kind::Spiral => "spiral",
            Kind::Doppler => "doppler",
            Kind::Dispersion => "dispersion",
            Kind::Ramsey => "ramsey",
        }
    }

    pub fn is_stochastic(self) -> bool {
        matches!(self, Kind::SqlScaling | Kind::HeisenbergScaling)
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    schema_version: u32,
    kind: Kind,
    seed: Option<u64>,
    output: Option<PathBuf>,
    #[serde(default)]
    params: toml::Table,
}

/// Parsed and validated experiment configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub kind: Kind,
    pub seed: Option<u64>,
    pub output: Option<PathBuf>,
    pub params: toml::Table,
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        if raw.schema_version != SCHEMA_VERSION {
            return Err(CliError::Config(format!(
                "schema_version {} is not supported (expected {SCHEMA_VERSION})",
                raw.schema_version
            )));
        }
        let cfg = Self { kind: raw.kind, seed: raw.seed, output: raw.output, params: raw.params };
        // Reject unknown or ill-typed parameters before anything runs.
        crate::experiments::validate_params(&cfg)?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Seed, required for stochastic kinds.
    pub fn require_seed(&self) -> Result<u64, CliError> {
        self.seed
            .ok_or_else(|| CliError::Config(format!("{} is stochastic: a `seed` is required", self.kind.name())))
    }

    pub fn params<T: DeserializeOwned>(&self) -> Result<T, CliError> {
        toml::Value::Table(self.params.clone())
            .try_into()
            .map_err(|e: toml::de::Error| CliError::Config(format!("[params]: {e}")))
    }
}
