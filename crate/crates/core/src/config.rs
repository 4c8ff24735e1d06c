//! The run configuration file: device constants, learner settings, trace
//! partitioning, baseline controller and output format.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::controller::{ControllerConfig, MemoryRequest};
use crate::dram::{AddressMapping, DeviceParams, DramTopology, EnergyParams, TimingParams};
use crate::rl::LearnerConfig;
use crate::trace::{split, TraceRecord, DEFAULT_GAP};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TraceSettings {
    /// Records per partition; one partition is one learner step.
    pub split: usize,
    /// Cycles between records for generated traces.
    pub gap: u64,
}

impl Default for TraceSettings {
    fn default() -> Self {
        Self { split: 30_000, gap: DEFAULT_GAP }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    #[default]
    Csv,
    Json,
}

impl FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "csv" => Ok(ReportFormat::Csv),
            "json" => Ok(ReportFormat::Json),
            other => Err(format!("unknown format `{other}` (expected csv or json)")),
        }
    }
}

impl fmt::Display for ReportFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ReportFormat::Csv => "csv",
            ReportFormat::Json => "json",
        })
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSettings {
    pub format: ReportFormat,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub topology: DramTopology,
    pub timing: TimingParams,
    pub energy: EnergyParams,
    /// Derived from the topology when absent.
    pub mapping: Option<AddressMapping>,
    pub learner: LearnerConfig,
    pub trace: TraceSettings,
    pub baseline: ControllerConfig,
    pub output: OutputSettings,
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("config syntax: {0}")]
    Syntax(String),
    #[error("invalid config: {}", .0.join("; "))]
    Invalid(Vec<String>),
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| ConfigError::Syntax(e.message().to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| ConfigError::Io { path: path.display().to_string(), source })?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn device(&self) -> DeviceParams {
        DeviceParams {
            topology: self.topology,
            timing: self.timing,
            energy: self.energy,
            mapping: self.mapping.unwrap_or_else(|| AddressMapping::for_topology(&self.topology)),
        }
    }

    /// Checks every section and reports all problems at once.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let mut errors = Vec::new();
        self.device().validate(&mut errors);
        self.learner.validate(&mut errors);
        if self.trace.split == 0 {
            errors.push("trace.split: must be at least 1".into());
        }
        if self.trace.gap == 0 {
            errors.push("trace.gap: must be at least 1".into());
        }
        self.baseline.validate("baseline", &mut errors);
        if errors.is_empty() {
            Ok(())
        } else {
            Err(ConfigError::Invalid(errors))
        }
    }

    /// Partitions a trace into numbered request batches.
    pub fn partitions(&self, records: &[TraceRecord]) -> Vec<Vec<MemoryRequest>> {
        let mut next_id = 0;
        split(records, self.trace.split)
            .into_iter()
            .map(|p| {
                let requests = MemoryRequest::from_records(&p.records, next_id);
                next_id += requests.len() as u64;
                requests
            })
            .collect()
    }
}
