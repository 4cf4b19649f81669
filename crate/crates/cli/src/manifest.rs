//! Run manifest, written as TOML next to the outputs.

use std::path::Path;

use anyhow::Result;
use serde::Serialize;

use crate::config::RunConfig;

#[derive(Debug, Clone, Serialize)]
pub struct RunInfo {
    pub command: String,
    pub version: String,
    pub seed: u64,
    pub threads: usize,
    pub wall_clock_s: f64,
}

impl RunInfo {
    pub fn new(command: &str, seed: u64, wall_clock_s: f64) -> Self {
        Self {
            command: command.into(),
            version: env!("CARGO_PKG_VERSION").into(),
            seed,
            threads: rayon::current_num_threads(),
            wall_clock_s,
        }
    }
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct ConstantsInfo {
    pub c1: f64,
    pub b3_half: f64,
    pub b3_three_quarter: f64,
    pub lipschitz: f64,
    pub radius: f64,
    pub source: Vec<String>,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct MonitorInfo {
    pub steps: usize,
    pub t_final: f64,
    pub verdict: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_max: Option<f64>,
    pub max_contraction: f64,
    pub monitor_warnings: usize,
    pub ball_violations: usize,
    pub max_picard_iters: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub run: RunInfo,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub config: Option<RunConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub constants: Option<ConstantsInfo>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub monitor: Option<MonitorInfo>,
    /// free-form results: convergence orders, verification counts
    #[serde(skip_serializing_if = "toml::Table::is_empty")]
    pub results: toml::Table,
    pub outputs: Vec<String>,
}

impl RunManifest {
    pub fn new(run: RunInfo) -> Self {
        Self { run, config: None, constants: None, monitor: None, results: toml::Table::new(), outputs: Vec::new() }
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        std::fs::write(dir.join("manifest.toml"), toml::to_string(self)?)?;
        Ok(())
    }
}
