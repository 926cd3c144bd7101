//! Experiment configuration files.
//!
//! ```json
//! {
//!   "instance": "instance.json",
//!   "arrivals": {"mode": "stochastic"},
//!   "policies": [{"policy": "hi-lcb", "alpha": 0.52, "cost_mode": "fixed"}],
//!   "seeds": {"count": 100, "base": 0},
//!   "horizon": 100000,
//!   "checkpoints": [1000, 10000, 100000]
//! }
//! ```
//!
//! `instance` is either a path or an inline instance document. Relative
//! paths are resolved against the config file's directory.

use std::fs::File;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use anyhow::{bail, ensure, Context, Result};
use hil_core::analytics::validate_checkpoints;
use hil_core::environment::{read_index_sequence, ArrivalProcess};
use hil_core::ingest::read_quantized_rows;
use hil_core::policies::{PolicyConfig, PolicyKind};
use hil_core::InstanceSpec;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum InstanceSource {
    Path(PathBuf),
    Inline(InstanceSpec),
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum ArrivalsConfig {
    /// i.i.d. draws from the instance weights.
    #[default]
    Stochastic,
    /// One 0-based bin index per line.
    Adversarial { path: PathBuf },
    /// `bin,correct` rows as written by `hil ingest`.
    Trace { path: PathBuf },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeedsConfig {
    pub count: usize,
    #[serde(default)]
    pub base: u64,
}

impl Default for SeedsConfig {
    fn default() -> Self {
        Self { count: 1, base: 0 }
    }
}

impl SeedsConfig {
    /// `base, base + 1, …, base + count − 1`.
    pub fn list(&self) -> Vec<u64> {
        (0..self.count as u64).map(|i| self.base.wrapping_add(i)).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub instance: InstanceSource,
    #[serde(default)]
    pub arrivals: ArrivalsConfig,
    pub policies: Vec<PolicyConfig>,
    #[serde(default)]
    pub seeds: SeedsConfig,
    pub horizon: usize,
    /// Defaults to the horizon alone.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub checkpoints: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

/// A config with files loaded and defaults filled in.
#[derive(Debug, Clone)]
pub struct Experiment {
    pub instance: InstanceSpec,
    pub arrivals: ArrivalProcess,
    pub policies: Vec<PolicyConfig>,
    pub seeds: Vec<u64>,
    pub horizon: usize,
    pub checkpoints: Vec<usize>,
    pub output: Option<PathBuf>,
    /// Self-contained config that reproduces this experiment.
    pub echo: ExperimentConfig,
}

fn resolve(base: &Path, p: &Path) -> PathBuf {
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}

pub fn read_instance(path: &Path) -> Result<InstanceSpec> {
    let file = File::open(path).with_context(|| format!("opening instance {}", path.display()))?;
    serde_json::from_reader(BufReader::new(file))
        .with_context(|| format!("parsing instance {}", path.display()))
}

impl ExperimentConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        let file = File::open(path).with_context(|| format!("opening config {}", path.display()))?;
        serde_json::from_reader(BufReader::new(file))
            .with_context(|| format!("parsing config {}", path.display()))
    }

    /// Loads referenced files (relative to `base_dir`), applies the seed
    /// override and checks everything that can be checked up front.
    pub fn resolve(&self, base_dir: &Path, seed_override: Option<u64>) -> Result<Experiment> {
        let instance = match &self.instance {
            InstanceSource::Path(p) => read_instance(&resolve(base_dir, p))?,
            InstanceSource::Inline(spec) => spec.clone(),
        };

        let (arrivals, arrivals_echo) = match &self.arrivals {
            ArrivalsConfig::Stochastic => (
                ArrivalProcess::from_instance(&instance)
                    .context("stochastic arrivals need instance weights")?,
                ArrivalsConfig::Stochastic,
            ),
            ArrivalsConfig::Adversarial { path } => {
                let path = absolute(&resolve(base_dir, path))?;
                let file = File::open(&path)
                    .with_context(|| format!("opening arrival sequence {}", path.display()))?;
                let seq = read_index_sequence(BufReader::new(file))
                    .with_context(|| format!("reading {}", path.display()))?;
                (ArrivalProcess::Adversarial(seq), ArrivalsConfig::Adversarial { path })
            }
            ArrivalsConfig::Trace { path } => {
                let path = absolute(&resolve(base_dir, path))?;
                let file = File::open(&path)
                    .with_context(|| format!("opening trace {}", path.display()))?;
                let rows = read_quantized_rows(BufReader::new(file), instance.bins())
                    .with_context(|| format!("reading {}", path.display()))?;
                (ArrivalProcess::TraceReplay(rows), ArrivalsConfig::Trace { path })
            }
        };

        ensure!(self.horizon >= 1, "horizon must be at least 1");
        ensure!(!self.policies.is_empty(), "config lists no policies");
        ensure!(self.seeds.count >= 1, "seeds.count must be at least 1");
        let checkpoints = self.checkpoints.clone().unwrap_or_else(|| vec![self.horizon]);
        validate_checkpoints(&checkpoints, self.horizon)?;

        // Hedge's automatic rates are tuned to the run's own horizon.
        let policies: Vec<PolicyConfig> = self
            .policies
            .iter()
            .map(|p| {
                let mut p = p.clone();
                if p.policy == PolicyKind::Hedge && p.horizon_hint.is_none() {
                    p.horizon_hint = Some(self.horizon as u64);
                }
                p
            })
            .collect();
        for p in &policies {
            p.validate()
                .with_context(|| format!("policy {}", p.label()))?;
            p.build(&instance, 0)
                .with_context(|| format!("policy {}", p.label()))?;
        }
        let mut labels: Vec<String> = policies.iter().map(PolicyConfig::label).collect();
        labels.sort();
        if let Some(w) = labels.windows(2).find(|w| w[0] == w[1]) {
            bail!("duplicate policy label {:?}; set \"label\" to tell them apart", w[0]);
        }

        let seeds = SeedsConfig {
            base: seed_override.unwrap_or(self.seeds.base),
            ..self.seeds
        };
        let echo = ExperimentConfig {
            instance: InstanceSource::Inline(instance.clone()),
            arrivals: arrivals_echo,
            policies: policies.clone(),
            seeds,
            horizon: self.horizon,
            checkpoints: Some(checkpoints.clone()),
            output: None,
        };
        Ok(Experiment {
            instance,
            arrivals,
            policies,
            seeds: seeds.list(),
            horizon: self.horizon,
            checkpoints,
            output: self.output.as_ref().map(|p| resolve(base_dir, p)),
            echo,
        })
    }
}

fn absolute(p: &Path) -> Result<PathBuf> {
    std::path::absolute(p).with_context(|| format!("resolving {}", p.display()))
}

/// Loads and resolves a config file.
pub fn load(path: &Path, seed_override: Option<u64>) -> Result<Experiment> {
    let cfg = ExperimentConfig::from_file(path)?;
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    cfg.resolve(base, seed_override)
}
