//! Online bandwidth adaptation by a one-step look-ahead meta-gradient.
//!
//! The bandwidth is parameterized as `sigma = sigma0 * exp(theta)`. Each step
//! freezes the cloud, the subsample and the raw sparse gradient, moves the
//! subsampled points one NW step ahead, and descends the diagram loss of the
//! moved points with respect to `theta`.

use crate::cloud::PointCloud;
use crate::error::{Error, Result};
use crate::losses::{loss_value, LossSpec, PersistenceOptions};
use crate::optimizer::{run, OptimizerConfig, RunTrajectory};
use crate::persistence::{self, SparseGradient};
use crate::smoothing::{nw_eval, SmoothField};
use crate::subsample::SubsampleIndices;

/// Largest change of `theta` allowed in one update.
pub const THETA_TRUST_REGION: f64 = 1.0;

/// `|theta|` is kept below this so that `sigma0 * exp(theta)` stays a
/// positive normal float for any reasonable `sigma0`.
pub const THETA_LIMIT: f64 = 500.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandwidthState {
    pub sigma0: f64,
    pub theta: f64,
    pub eta_sigma: f64,
    /// Step of the central difference in `theta`.
    pub fd_step: f64,
}

impl BandwidthState {
    pub fn new(sigma0: f64, eta_sigma: f64) -> Result<Self> {
        if !(sigma0 > 0.0 && sigma0.is_finite()) {
            return Err(Error::invalid("sigma0 must be a positive real"));
        }
        if !(eta_sigma > 0.0 && eta_sigma.is_finite()) {
            return Err(Error::invalid("eta_sigma must be a positive real"));
        }
        Ok(BandwidthState {
            sigma0,
            theta: 0.0,
            eta_sigma,
            fd_step: 1e-3,
        })
    }

    pub fn with_fd_step(mut self, h: f64) -> Result<Self> {
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::invalid("sigma_fd_step must be a positive real"));
        }
        self.fd_step = h;
        Ok(self)
    }

    pub fn sigma(&self) -> f64 {
        self.sigma_at(self.theta)
    }

    pub fn sigma_at(&self, theta: f64) -> f64 {
        self.sigma0 * theta.exp()
    }

    /// `theta <- theta - eta_sigma * derivative`, limited to the trust
    /// region. A non-finite derivative leaves `theta` unchanged.
    pub fn apply_meta_gradient(&mut self, derivative: f64) -> f64 {
        if !derivative.is_finite() {
            log::warn!("non-finite bandwidth meta-derivative ({derivative}); theta left at {}", self.theta);
            return self.sigma();
        }
        let step = (-self.eta_sigma * derivative).clamp(-THETA_TRUST_REGION, THETA_TRUST_REGION);
        self.theta = (self.theta + step).clamp(-THETA_LIMIT, THETA_LIMIT);
        self.sigma()
    }
}

/// Frozen inputs of one bandwidth step.
#[derive(Debug, Clone, Copy)]
pub struct LookAhead<'a> {
    pub cloud: &'a PointCloud,
    pub gradient: &'a SparseGradient,
    pub subsample: &'a SubsampleIndices,
    pub eta_x: f64,
    pub loss: &'a LossSpec,
    pub persistence: PersistenceOptions,
}

impl LookAhead<'_> {
    /// Diagram loss of the subsample after one NW step with bandwidth `sigma`.
    pub fn loss(&self, sigma: f64) -> Result<f64> {
        let field = SmoothField::nw_from_sparse(self.cloud, self.gradient, sigma)?;
        let moved = self.cloud.select(&self.subsample.indices);
        let velocity = nw_eval(&field, moved.as_flat())?;
        let coords: Vec<f64> = moved
            .as_flat()
            .iter()
            .zip(&velocity)
            .map(|(x, v)| x - self.eta_x * v)
            .collect();
        let moved = PointCloud::from_flat(self.cloud.dim(), coords)?;
        let pairs = persistence::diagram(&moved, self.loss.k, self.persistence.threshold, self.persistence.simplex_cap)?;
        Ok(loss_value(&pairs, self.loss))
    }

    /// Central difference of the look-ahead loss in `theta`.
    pub fn meta_derivative(&self, state: &BandwidthState) -> Result<f64> {
        let h = state.fd_step;
        let plus = self.loss(state.sigma_at(state.theta + h))?;
        let minus = self.loss(state.sigma_at(state.theta - h))?;
        Ok((plus - minus) / (2.0 * h))
    }
}

/// One bandwidth update. Returns the new `sigma`; with no anchors the state
/// is left untouched.
pub fn learn_sigma_step(look_ahead: &LookAhead<'_>, state: &mut BandwidthState) -> Result<f64> {
    if look_ahead.gradient.is_empty() {
        return Ok(state.sigma());
    }
    if !(look_ahead.eta_x > 0.0) {
        return Err(Error::invalid("eta_x must be positive"));
    }
    let derivative = look_ahead.meta_derivative(state)?;
    Ok(state.apply_meta_gradient(derivative))
}

/// Runs the optimizer once per fixed bandwidth, all with the same seed.
/// Bandwidth learning is disabled for the sweep.
pub fn sigma_sweep(cloud0: &PointCloud, base: &OptimizerConfig, grid: &[f64]) -> Result<Vec<(f64, RunTrajectory)>> {
    if grid.is_empty() {
        return Err(Error::invalid("sigma grid is empty"));
    }
    grid.iter()
        .map(|&sigma| {
            let config = OptimizerConfig {
                sigma,
                learn_sigma: false,
                ..base.clone()
            };
            Ok((sigma, run(cloud0, &config)?))
        })
        .collect()
}
