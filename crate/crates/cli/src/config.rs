//! Experiment configuration files: the run parameters plus replication count
//! and plot options, as one archivable JSON document.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use gfb_core::harness::{DomSpec, EnvSpec, GraphSpec, PolicyKind, RunConfig};

fn default_trace_stride() -> u64 {
    100
}

fn default_seeds() -> u32 {
    1
}

/// Unknown keys are rejected; relative paths inside (`graph.file`,
/// `environment.table`) are resolved against the config file's directory.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub graph: GraphSpec,
    #[serde(default)]
    pub dominating_set: DomSpec,
    pub policy: PolicyKind,
    pub environment: EnvSpec,
    pub horizon: u64,
    pub delta: f64,
    pub seed: u64,
    #[serde(default = "default_trace_stride")]
    pub trace_stride: u64,
    /// Number of replications (seeds seed..seed+seeds).
    #[serde(default = "default_seeds")]
    pub seeds: u32,
    /// Emit plot.svg next to the trace.
    #[serde(default)]
    pub plot: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub plot_title: Option<String>,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("{}: {e}", path.display()))?;
        let mut config: ExperimentConfig = serde_json::from_str(&text).map_err(|e| {
            format!(
                "{}: line {}, column {}: {e}",
                path.display(),
                e.line(),
                e.column()
            )
        })?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        config.resolve_paths(base);
        Ok(config)
    }

    /// Makes file references absolute relative to the config location.
    fn resolve_paths(&mut self, base: &Path) {
        fn rebase(base: &Path, p: &mut PathBuf) {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        if let Some(file) = self.graph.file.as_mut() {
            rebase(base, file);
        }
        if let Some(table) = self.environment.table.as_mut() {
            rebase(base, table);
        }
    }

    pub fn run_config(&self) -> RunConfig {
        RunConfig {
            graph: self.graph.clone(),
            dominating_set: self.dominating_set.clone(),
            policy: self.policy,
            environment: self.environment.clone(),
            horizon: self.horizon,
            delta: self.delta,
            seed: self.seed,
            trace_stride: self.trace_stride,
        }
    }
}
