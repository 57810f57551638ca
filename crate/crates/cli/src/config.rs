//! JSON run configuration, flag overrides and resolution into core types.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Deserializer, Serialize};

use nwtopo::dataset::{generate_dataset, DatasetKind};
use nwtopo::losses::{LossKind, LossSpec, PersistenceOptions};
use nwtopo::optimizer::{Method, OptimizerConfig};
use nwtopo::persistence::DEFAULT_SIMPLEX_CAP;
use nwtopo::subsample::Sampler;
use nwtopo::{PointCloud, RngSeed};

use crate::CliError;

/// Environment variable naming the default output directory.
pub const OUT_ENV: &str = "NWTOPO_OUT";
pub const DEFAULT_OUT: &str = "out";
pub const DEFAULT_SIGMAS: [f64; 5] = [0.025, 0.05, 0.1, 0.2, 0.4];
pub const DEFAULT_METHODS: [Method; 3] = [Method::Vanilla, Method::Kernel, Method::Nw];

/// Output directory precedence: flag, config, environment, `out`.
pub fn resolve_out(flag: Option<&Path>, config: Option<&Path>) -> PathBuf {
    flag.or(config)
        .map(Path::to_path_buf)
        .or_else(|| std::env::var_os(OUT_ENV).filter(|v| !v.is_empty()).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DatasetBlock {
    /// `noisy-circle`, `uniform-square`, `two-blobs` or `from-file`.
    pub kind: String,
    pub n: usize,
    pub noise: f64,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
}

impl Default for DatasetBlock {
    fn default() -> Self {
        DatasetBlock {
            kind: "noisy-circle".into(),
            n: 1000,
            noise: 0.1,
            seed: 0,
            path: None,
        }
    }
}

// Distinguishes an absent key (outer `None`) from an explicit `null`.
fn explicit<'de, D, T>(d: D) -> Result<Option<Option<T>>, D::Error>
where
    D: Deserializer<'de>,
    T: Deserialize<'de>,
{
    Option::<T>::deserialize(d).map(Some)
}

/// Loss block. Missing `k`, `box_bound` and `box_weight` come from the
/// kind's preset; `"box_bound": null` disables the box penalty.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LossBlock {
    pub kind: LossKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub top_m: Option<usize>,
    #[serde(default, deserialize_with = "explicit", skip_serializing_if = "Option::is_none")]
    pub box_bound: Option<Option<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub box_weight: Option<f64>,
}

impl Default for LossBlock {
    fn default() -> Self {
        LossBlock {
            kind: LossKind::Collapser,
            k: None,
            top_m: None,
            box_bound: None,
            box_weight: None,
        }
    }
}

impl LossBlock {
    pub fn spec(&self) -> LossSpec {
        let preset = LossSpec::preset(self.kind);
        LossSpec {
            kind: self.kind,
            k: self.k.unwrap_or(preset.k),
            top_m: self.top_m,
            box_bound: self.box_bound.unwrap_or(preset.box_bound),
            box_weight: self.box_weight.unwrap_or(preset.box_weight),
        }
    }

    fn resolved(&self) -> Self {
        let spec = self.spec();
        LossBlock {
            kind: spec.kind,
            k: Some(spec.k),
            top_m: spec.top_m,
            box_bound: Some(spec.box_bound),
            box_weight: Some(spec.box_weight),
        }
    }
}

/// One bench entry; unset fields fall back to the top-level values, except
/// the sampler, which falls back to the entry method's default.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MethodEntry {
    pub method: Method,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sampler: Option<Sampler>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta_x: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub learn_sigma: Option<bool>,
}

impl MethodEntry {
    pub fn plain(method: Method) -> Self {
        MethodEntry {
            method,
            sampler: None,
            sigma: None,
            eta_x: None,
            learn_sigma: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfigFile {
    pub dataset: DatasetBlock,
    pub method: Method,
    /// `None` picks the method's default sampler.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sampler: Option<Sampler>,
    pub loss: LossBlock,
    pub s: usize,
    pub epochs: usize,
    pub eta_x: f64,
    pub sigma: f64,
    pub learn_sigma: bool,
    pub eta_sigma: f64,
    pub sigma_fd_step: f64,
    pub seed: u64,
    pub snapshot_every: usize,
    /// Rips threshold; `null` means no threshold.
    pub threshold: Option<f64>,
    pub simplex_cap: usize,
    /// Kernel jitter; `null` means `1e-10 * |I|`.
    pub jitter: Option<f64>,
    pub timing: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub methods: Option<Vec<MethodEntry>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigmas: Option<Vec<f64>>,
}

impl Default for RunConfigFile {
    fn default() -> Self {
        let base = OptimizerConfig::new(Method::Nw, LossSpec::preset(LossKind::Collapser));
        RunConfigFile {
            dataset: DatasetBlock::default(),
            method: base.method,
            sampler: None,
            loss: LossBlock::default(),
            s: base.s,
            epochs: base.epochs,
            eta_x: base.eta_x,
            sigma: base.sigma,
            learn_sigma: base.learn_sigma,
            eta_sigma: base.eta_sigma,
            sigma_fd_step: base.sigma_fd_step,
            seed: base.seed.0,
            snapshot_every: base.snapshot_every,
            threshold: None,
            simplex_cap: DEFAULT_SIMPLEX_CAP,
            jitter: base.jitter,
            timing: base.timing,
            output_dir: None,
            methods: None,
            sigmas: None,
        }
    }
}

impl RunConfigFile {
    /// Reads a config file, or returns the defaults when `path` is `None`.
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else {
            return Ok(RunConfigFile::default());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    /// Fills every defaulted field so the result can be written as a manifest
    /// that reproduces the run when loaded again.
    pub fn resolved(&self, output_dir: PathBuf) -> Self {
        RunConfigFile {
            sampler: Some(self.sampler.unwrap_or(self.method.default_sampler())),
            loss: self.loss.resolved(),
            threshold: self.threshold.filter(|t| t.is_finite()),
            output_dir: Some(output_dir),
            ..self.clone()
        }
    }

    pub fn dataset_kind(&self) -> Result<DatasetKind, CliError> {
        DatasetKind::parse(&self.dataset.kind, self.dataset.path.clone()).map_err(CliError::from_core)
    }

    pub fn load_dataset(&self) -> Result<PointCloud, CliError> {
        let kind = self.dataset_kind()?;
        let d = &self.dataset;
        generate_dataset(&kind, d.n, d.noise, RngSeed(d.seed)).map_err(CliError::from_core)
    }

    pub fn persistence(&self) -> PersistenceOptions {
        PersistenceOptions {
            threshold: self.threshold.unwrap_or(f64::INFINITY),
            simplex_cap: self.simplex_cap,
        }
    }

    pub fn optimizer_config(&self) -> OptimizerConfig {
        OptimizerConfig {
            method: self.method,
            sampler: self.sampler.unwrap_or(self.method.default_sampler()),
            loss: self.loss.spec(),
            s: self.s,
            epochs: self.epochs,
            eta_x: self.eta_x,
            sigma: self.sigma,
            learn_sigma: self.learn_sigma,
            eta_sigma: self.eta_sigma,
            sigma_fd_step: self.sigma_fd_step,
            seed: RngSeed(self.seed),
            snapshot_every: self.snapshot_every,
            persistence: self.persistence(),
            jitter: self.jitter,
            timing: self.timing,
        }
    }

    pub fn bench_entries(&self) -> Vec<MethodEntry> {
        self.methods
            .clone()
            .unwrap_or_else(|| DEFAULT_METHODS.iter().copied().map(MethodEntry::plain).collect())
    }

    pub fn bench_configs(&self) -> Vec<OptimizerConfig> {
        let base = self.optimizer_config();
        self.bench_entries()
            .iter()
            .map(|e| OptimizerConfig {
                method: e.method,
                sampler: e.sampler.unwrap_or(e.method.default_sampler()),
                sigma: e.sigma.unwrap_or(base.sigma),
                eta_x: e.eta_x.unwrap_or(base.eta_x),
                learn_sigma: e.learn_sigma.unwrap_or(base.learn_sigma),
                ..base.clone()
            })
            .collect()
    }

    pub fn sweep_grid(&self) -> Vec<f64> {
        self.sigmas.clone().unwrap_or_else(|| DEFAULT_SIGMAS.to_vec())
    }
}
