//! The outer optimization loop and the three compared update rules.
//!
//! Every epoch draws a subsample, computes the diagram loss and its sparse
//! gradient on it, extends the gradient according to the method, and takes
//! a plain gradient step on all points:
//!
//! * `Vanilla` moves the anchors only.
//! * `Kernel` moves every point along the exact Gaussian-RKHS interpolant.
//! * `Nw` moves every point along the Nadaraya-Watson field, optionally
//!   adapting the bandwidth first.

use std::io::Write;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::bandwidth::{learn_sigma_step, BandwidthState, LookAhead};
use crate::cloud::PointCloud;
use crate::error::{Error, Result};
use crate::losses::{total_loss_and_sparse_gradient, LossSpec, PersistenceOptions};
use crate::persistence::SparseGradient;
use crate::rng::{RngSeed, Stream};
use crate::smoothing::{anchor_arrays, kernel_solve, SmoothField};
use crate::subsample::Sampler;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Vanilla,
    Kernel,
    Nw,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Vanilla => "vanilla",
            Method::Kernel => "kernel",
            Method::Nw => "nw",
        }
    }

    /// Random slicing for NW, uniform sampling for the baselines.
    pub fn default_sampler(self) -> Sampler {
        match self {
            Method::Nw => Sampler::Slicing,
            Method::Vanilla | Method::Kernel => Sampler::Uniform,
        }
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(name: &str) -> Result<Self> {
        match name {
            "vanilla" => Ok(Method::Vanilla),
            "kernel" => Ok(Method::Kernel),
            "nw" => Ok(Method::Nw),
            other => Err(Error::invalid(format!("unknown method {other:?} (expected vanilla, kernel or nw)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerConfig {
    pub method: Method,
    pub sampler: Sampler,
    pub loss: LossSpec,
    /// Subsample size.
    pub s: usize,
    pub epochs: usize,
    pub eta_x: f64,
    /// Bandwidth of the kernel and NW fields; base bandwidth when learning.
    pub sigma: f64,
    pub learn_sigma: bool,
    pub eta_sigma: f64,
    pub sigma_fd_step: f64,
    pub seed: RngSeed,
    /// Keep a copy of the cloud every this many epochs; 0 disables.
    pub snapshot_every: usize,
    pub persistence: PersistenceOptions,
    /// Kernel diagonal jitter; `None` uses `1e-10 * |I|`.
    pub jitter: Option<f64>,
    /// Record wall-clock time per epoch. When off, the seconds column is 0
    /// and trajectories are byte-for-byte reproducible.
    pub timing: bool,
}

impl OptimizerConfig {
    pub fn new(method: Method, loss: LossSpec) -> Self {
        OptimizerConfig {
            method,
            sampler: method.default_sampler(),
            loss,
            s: 100,
            epochs: 50,
            eta_x: 0.05,
            sigma: 0.1,
            learn_sigma: false,
            eta_sigma: 1e-3,
            sigma_fd_step: 1e-3,
            seed: RngSeed(0),
            snapshot_every: 0,
            persistence: PersistenceOptions::default(),
            jitter: None,
            timing: true,
        }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        self.loss.validate()?;
        if self.s > n {
            return Err(Error::invalid(format!("subsample size {} exceeds cloud size {n}", self.s)));
        }
        let min_s = if self.sampler == Sampler::Slicing { 2 } else { 1 };
        if self.s < min_s {
            return Err(Error::invalid(format!("subsample size must be at least {min_s}")));
        }
        if !(self.eta_x > 0.0 && self.eta_x.is_finite()) {
            return Err(Error::invalid("eta_x must be a positive real"));
        }
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return Err(Error::invalid("sigma must be a positive real"));
        }
        if self.learn_sigma {
            BandwidthState::new(self.sigma, self.eta_sigma)?.with_fd_step(self.sigma_fd_step)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpochRecord {
    pub epoch: usize,
    pub loss: f64,
    /// Bandwidth used for this epoch's update (0 for vanilla).
    pub sigma: f64,
    pub anchors: usize,
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunTrajectory {
    pub records: Vec<EpochRecord>,
    /// `(epoch, cloud at the start of that epoch)`.
    pub snapshots: Vec<(usize, PointCloud)>,
    pub final_cloud: PointCloud,
}

impl RunTrajectory {
    pub fn best_loss(&self) -> Option<f64> {
        self.records.iter().map(|r| r.loss).min_by(f64::total_cmp)
    }

    pub fn mean_epoch_seconds(&self) -> Option<f64> {
        (!self.records.is_empty())
            .then(|| self.records.iter().map(|r| r.seconds).sum::<f64>() / self.records.len() as f64)
    }

    /// `epoch,loss,sigma,anchors,seconds` with a header row.
    pub fn write_csv<W: Write>(&self, out: &mut W) -> std::io::Result<()> {
        writeln!(out, "epoch,loss,sigma,anchors,seconds")?;
        for r in &self.records {
            writeln!(out, "{},{:?},{:?},{},{:?}", r.epoch, r.loss, r.sigma, r.anchors, r.seconds)?;
        }
        Ok(())
    }
}

/// Per-point displacement direction for one epoch (row-major `n x d`); the
/// update is `x <- x - eta_x * displacement`. Empty gradients give zeros.
pub fn epoch_displacement(
    method: Method,
    cloud: &PointCloud,
    gradient: &SparseGradient,
    sigma: f64,
    jitter: Option<f64>,
) -> Result<Vec<f64>> {
    if gradient.is_empty() {
        return Ok(vec![0.0; cloud.as_flat().len()]);
    }
    match method {
        Method::Vanilla => Ok(gradient.to_dense(cloud.len())),
        Method::Nw => SmoothField::nw_from_sparse(cloud, gradient, sigma)?.eval(cloud.as_flat()),
        Method::Kernel => {
            let (anchors, grads) = anchor_arrays(cloud, gradient);
            kernel_solve(cloud.dim(), anchors, grads, sigma, jitter)?.eval(cloud.as_flat())
        }
    }
}

/// Runs `config.epochs` epochs from `cloud0`. Deterministic given the seed
/// (apart from the optional timing column).
pub fn run(cloud0: &PointCloud, config: &OptimizerConfig) -> Result<RunTrajectory> {
    config.validate(cloud0.len())?;
    let mut rng = config.seed.stream(Stream::Subsample);
    let mut bandwidth = if config.learn_sigma && config.method == Method::Nw {
        Some(BandwidthState::new(config.sigma, config.eta_sigma)?.with_fd_step(config.sigma_fd_step)?)
    } else {
        None
    };
    let mut cloud = cloud0.clone();
    let mut trajectory = RunTrajectory {
        records: Vec::with_capacity(config.epochs),
        snapshots: Vec::new(),
        final_cloud: cloud0.clone(),
    };

    for epoch in 0..config.epochs {
        if config.snapshot_every > 0 && epoch % config.snapshot_every == 0 {
            trajectory.snapshots.push((epoch, cloud.clone()));
        }
        let start = Instant::now();
        let outcome = run_epoch(&mut cloud, config, &mut rng, bandwidth.as_mut());
        let seconds = if config.timing { start.elapsed().as_secs_f64() } else { 0.0 };
        match outcome {
            Ok((loss, sigma, anchors)) => trajectory.records.push(EpochRecord {
                epoch,
                loss,
                sigma,
                anchors,
                seconds,
            }),
            Err(source) => {
                trajectory.final_cloud = cloud;
                return Err(Error::RunAborted {
                    epoch,
                    source: Box::new(source),
                    partial: Box::new(trajectory),
                });
            }
        }
    }
    trajectory.final_cloud = cloud;
    Ok(trajectory)
}

fn run_epoch(
    cloud: &mut PointCloud,
    config: &OptimizerConfig,
    rng: &mut rand_chacha::ChaCha20Rng,
    bandwidth: Option<&mut BandwidthState>,
) -> Result<(f64, f64, usize)> {
    let subsample = config.sampler.draw(cloud, config.s, rng)?;
    let eval = total_loss_and_sparse_gradient(cloud, &subsample, &config.loss, config.persistence)?;
    if !eval.value.is_finite() {
        return Err(Error::invalid(format!("loss became non-finite ({})", eval.value)));
    }

    let sigma = match (config.method, bandwidth) {
        (Method::Vanilla, _) => 0.0,
        (Method::Nw, Some(state)) => {
            let look_ahead = LookAhead {
                cloud,
                gradient: &eval.gradient,
                subsample: &subsample,
                eta_x: config.eta_x,
                loss: &config.loss,
                persistence: config.persistence,
            };
            learn_sigma_step(&look_ahead, state)?
        }
        _ => config.sigma,
    };

    let displacement = epoch_displacement(config.method, cloud, &eval.gradient, sigma, config.jitter)?;
    for (x, v) in cloud.as_flat_mut().iter_mut().zip(&displacement) {
        *x -= config.eta_x * v;
    }
    if !cloud.all_finite() {
        return Err(Error::invalid("update produced non-finite coordinates"));
    }
    Ok((eval.value, sigma, eval.gradient.len()))
}

/// One line of a method comparison.
#[derive(Debug, Clone)]
pub struct BenchRow {
    pub method: Method,
    pub sampler: Sampler,
    pub best_loss: f64,
    pub mean_epoch_seconds: f64,
    pub trajectory: RunTrajectory,
}

/// Runs every configuration on the same initial cloud.
pub fn bench(cloud0: &PointCloud, configs: &[OptimizerConfig]) -> Result<Vec<BenchRow>> {
    if configs.is_empty() {
        return Err(Error::invalid("bench needs at least one configuration"));
    }
    configs
        .iter()
        .map(|config| {
            let trajectory = run(cloud0, config)?;
            Ok(BenchRow {
                method: config.method,
                sampler: config.sampler,
                best_loss: trajectory.best_loss().unwrap_or(f64::NAN),
                mean_epoch_seconds: trajectory.mean_epoch_seconds().unwrap_or(0.0),
                trajectory,
            })
        })
        .collect()
}

/// `method,sampler,best_loss,mean_epoch_seconds` with a header row.
pub fn write_bench_csv<W: Write>(rows: &[BenchRow], out: &mut W) -> std::io::Result<()> {
    writeln!(out, "method,sampler,best_loss,mean_epoch_seconds")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{:?},{:?}",
            r.method.name(),
            r.sampler.name(),
            r.best_loss,
            r.mean_epoch_seconds
        )?;
    }
    Ok(())
}
