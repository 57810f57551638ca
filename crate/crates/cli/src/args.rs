//! Command-line arguments. Flags given on the command line override the
//! JSON config; the defaults quoted in the help text apply when neither sets
//! a value.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use nwtopo::losses::LossKind;
use nwtopo::optimizer::Method;
use nwtopo::subsample::Sampler;

use crate::config::{MethodEntry, RunConfigFile};
use crate::CliError;

#[derive(Debug, Parser)]
#[command(name = "nwtopo", version, about = "Persistence-based point cloud optimization with smoothed topological gradients")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample a synthetic point cloud and write points.csv
    Generate(GenerateArgs),
    /// Run one optimization and write its trajectory and final cloud
    Run(RunArgs),
    /// Run several methods on the same cloud and write a comparison table
    Bench(BenchArgs),
    /// Run one optimization per fixed bandwidth
    SweepSigma(SweepArgs),
    /// Sample the NW and kernel fields of a preset anchor set on a grid
    Fields(FieldsArgs),
    /// Write the persistence diagram of a CSV point cloud
    Diagram(DiagramArgs),
}

#[derive(Debug, Args, Default)]
pub struct OutArg {
    /// Output directory [default: $NWTOPO_OUT, else "out"]
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    /// Dataset kind: noisy-circle, uniform-square or two-blobs
    #[arg(long, default_value = "noisy-circle")]
    pub kind: String,
    /// Number of points
    #[arg(long, default_value_t = 1000)]
    pub n: usize,
    /// Gaussian noise level of the noisy circle
    #[arg(long, default_value_t = 0.1)]
    pub noise: f64,
    /// Random seed
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub out: OutArg,
}

/// Overrides shared by every optimizer command.
#[derive(Debug, Args, Default)]
pub struct RunOverrides {
    /// JSON run configuration; unknown keys are rejected [default: built-in defaults]
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Dataset kind: noisy-circle, uniform-square, two-blobs or from-file [default: noisy-circle]
    #[arg(long)]
    pub dataset: Option<String>,
    /// Load the initial cloud from this CSV (implies --dataset from-file) [default: none]
    #[arg(long, value_name = "FILE")]
    pub points: Option<PathBuf>,
    /// Number of generated points [default: 1000]
    #[arg(long)]
    pub n: Option<usize>,
    /// Noise level of the noisy circle [default: 0.1]
    #[arg(long)]
    pub noise: Option<f64>,
    /// Seed of the dataset generator [default: 0]
    #[arg(long)]
    pub dataset_seed: Option<u64>,
    /// Loss: simplification, augmentation, collapser, maxpers2d or bunny [default: collapser]
    #[arg(long)]
    pub loss: Option<LossKind>,
    /// Homology degree of the loss [default: the loss preset's degree]
    #[arg(long)]
    pub k: Option<usize>,
    /// Only the top-m most persistent pairs enter the loss [default: all pairs]
    #[arg(long)]
    pub top_m: Option<usize>,
    /// Box half-width of the hinge penalty [default: the loss preset's box]
    #[arg(long)]
    pub box_bound: Option<f64>,
    /// Disable the box penalty [default: off]
    #[arg(long)]
    pub no_box: bool,
    /// Weight of the box penalty [default: 1]
    #[arg(long)]
    pub box_weight: Option<f64>,
    /// Subsample size [default: 100]
    #[arg(long)]
    pub s: Option<usize>,
    /// Number of epochs [default: 50]
    #[arg(long)]
    pub epochs: Option<usize>,
    /// Point step size [default: 0.05]
    #[arg(long)]
    pub eta_x: Option<f64>,
    /// Field bandwidth, or base bandwidth when learning it [default: 0.1]
    #[arg(long)]
    pub sigma: Option<f64>,
    /// Learn the NW bandwidth by one-step look-ahead [default: false]
    #[arg(long, value_name = "BOOL")]
    pub learn_sigma: Option<bool>,
    /// Learning rate of the log-bandwidth [default: 0.001]
    #[arg(long)]
    pub eta_sigma: Option<f64>,
    /// Finite-difference step of the bandwidth meta-derivative [default: 0.001]
    #[arg(long)]
    pub sigma_fd_step: Option<f64>,
    /// Seed of the optimizer's subsampling [default: 0]
    #[arg(long)]
    pub seed: Option<u64>,
    /// Write a snapshot every this many epochs, 0 disables [default: 0]
    #[arg(long)]
    pub snapshot_every: Option<usize>,
    /// Rips threshold [default: none]
    #[arg(long)]
    pub threshold: Option<f64>,
    /// Maximum number of simplices in a filtration [default: 5000000]
    #[arg(long)]
    pub simplex_cap: Option<usize>,
    /// Diagonal jitter of the kernel system [default: 1e-10 times the anchor count]
    #[arg(long)]
    pub jitter: Option<f64>,
    /// Record wall-clock seconds per epoch; false makes outputs byte-reproducible [default: true]
    #[arg(long, value_name = "BOOL")]
    pub timing: Option<bool>,
    #[command(flatten)]
    pub out: OutArg,
}

impl RunOverrides {
    /// Loads the config file (if any) and applies the flags on top.
    pub fn apply(&self) -> Result<RunConfigFile, CliError> {
        let mut c = RunConfigFile::load(self.config.as_deref())?;
        if let Some(v) = &self.dataset {
            c.dataset.kind = v.clone();
        }
        if let Some(p) = &self.points {
            c.dataset.kind = "from-file".into();
            c.dataset.path = Some(p.clone());
        }
        set(&mut c.dataset.n, self.n);
        set(&mut c.dataset.noise, self.noise);
        set(&mut c.dataset.seed, self.dataset_seed);
        if let Some(kind) = self.loss {
            if kind != c.loss.kind {
                // Preset-derived fields follow the new kind.
                c.loss.k = None;
                c.loss.box_bound = None;
                c.loss.box_weight = None;
            }
            c.loss.kind = kind;
        }
        if self.k.is_some() {
            c.loss.k = self.k;
        }
        if self.top_m.is_some() {
            c.loss.top_m = self.top_m;
        }
        if let Some(b) = self.box_bound {
            c.loss.box_bound = Some(Some(b));
        }
        if self.no_box {
            if self.box_bound.is_some() {
                return Err(CliError::Config("--no-box conflicts with --box-bound".into()));
            }
            c.loss.box_bound = Some(None);
        }
        if self.box_weight.is_some() {
            c.loss.box_weight = self.box_weight;
        }
        set(&mut c.s, self.s);
        set(&mut c.epochs, self.epochs);
        set(&mut c.eta_x, self.eta_x);
        set(&mut c.sigma, self.sigma);
        set(&mut c.learn_sigma, self.learn_sigma);
        set(&mut c.eta_sigma, self.eta_sigma);
        set(&mut c.sigma_fd_step, self.sigma_fd_step);
        set(&mut c.seed, self.seed);
        set(&mut c.snapshot_every, self.snapshot_every);
        if self.threshold.is_some() {
            c.threshold = self.threshold;
        }
        set(&mut c.simplex_cap, self.simplex_cap);
        if self.jitter.is_some() {
            c.jitter = self.jitter;
        }
        set(&mut c.timing, self.timing);
        if self.out.out.is_some() {
            c.output_dir = self.out.out.clone();
        }
        Ok(c)
    }
}

fn set<T>(slot: &mut T, value: Option<T>) {
    if let Some(v) = value {
        *slot = v;
    }
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Update rule: vanilla, kernel or nw [default: nw]
    #[arg(long)]
    pub method: Option<Method>,
    /// Subsampler: uniform or slicing [default: slicing for nw, uniform otherwise]
    #[arg(long)]
    pub sampler: Option<Sampler>,
    #[command(flatten)]
    pub common: RunOverrides,
}

impl RunArgs {
    pub fn config(&self) -> Result<RunConfigFile, CliError> {
        let mut c = self.common.apply()?;
        if let Some(m) = self.method {
            if m != c.method && self.sampler.is_none() {
                c.sampler = None;
            }
            c.method = m;
        }
        if self.sampler.is_some() {
            c.sampler = self.sampler;
        }
        Ok(c)
    }
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Comma-separated methods, each with its default sampler [default: vanilla,kernel,nw]
    #[arg(long, value_delimiter = ',')]
    pub methods: Option<Vec<Method>>,
    #[command(flatten)]
    pub common: RunOverrides,
}

impl BenchArgs {
    pub fn config(&self) -> Result<RunConfigFile, CliError> {
        let mut c = self.common.apply()?;
        if let Some(ms) = &self.methods {
            c.methods = Some(ms.iter().copied().map(MethodEntry::plain).collect());
        }
        Ok(c)
    }
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Comma-separated bandwidth grid [default: 0.025,0.05,0.1,0.2,0.4]
    #[arg(long, value_delimiter = ',')]
    pub sigmas: Option<Vec<f64>>,
    /// Update rule: vanilla, kernel or nw [default: nw]
    #[arg(long)]
    pub method: Option<Method>,
    #[command(flatten)]
    pub common: RunOverrides,
}

impl SweepArgs {
    pub fn config(&self) -> Result<RunConfigFile, CliError> {
        let mut c = self.common.apply()?;
        if let Some(m) = self.method {
            if m != c.method {
                c.sampler = None;
            }
            c.method = m;
        }
        if self.sigmas.is_some() {
            c.sigmas = self.sigmas.clone();
        }
        Ok(c)
    }
}

#[derive(Debug, Args)]
pub struct FieldsArgs {
    /// Anchor preset: ring-conflict, dipole, saddle-ring or random-sparse
    #[arg(long, default_value = "dipole")]
    pub preset: String,
    /// Seed of the random-sparse preset
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Bandwidth of both fields [default: the preset's bandwidth, 0.35]
    #[arg(long)]
    pub sigma: Option<f64>,
    /// Kernel diagonal jitter [default: 1e-10 times the anchor count]
    #[arg(long)]
    pub jitter: Option<f64>,
    /// Grid columns
    #[arg(long, default_value_t = 41)]
    pub nx: usize,
    /// Grid rows
    #[arg(long, default_value_t = 41)]
    pub ny: usize,
    #[command(flatten)]
    pub out: OutArg,
}

#[derive(Debug, Args)]
pub struct DiagramArgs {
    /// CSV point cloud, one point per row
    #[arg(long, value_name = "FILE")]
    pub points: PathBuf,
    /// Homology degree
    #[arg(long, default_value_t = 1)]
    pub k: usize,
    /// Rips threshold [default: none]
    #[arg(long)]
    pub threshold: Option<f64>,
    /// Maximum number of simplices in the filtration
    #[arg(long, default_value_t = nwtopo::persistence::DEFAULT_SIMPLEX_CAP)]
    pub simplex_cap: usize,
    /// Keep pairs with zero persistence [default: off]
    #[arg(long)]
    pub keep_zero: bool,
    #[command(flatten)]
    pub out: OutArg,
}
