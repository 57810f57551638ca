//! Synthetic point-cloud generators used by the experiments.

use std::f64::consts::TAU;
use std::path::PathBuf;

use rand::Rng;
use rand_distr::{Distribution, Normal, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::cloud::{load_points, PointCloud};
use crate::error::{Error, Result};
use crate::rng::{RngSeed, Stream};

/// Parameters of the imbalanced two-cluster mixture.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TwoBlobs {
    pub centers: [[f64; 2]; 2],
    pub std: f64,
    /// Probability that a point belongs to the first (majority) cluster.
    pub majority: f64,
}

impl Default for TwoBlobs {
    fn default() -> Self {
        TwoBlobs {
            centers: [[-1.5, 0.0], [1.5, 0.0]],
            std: 0.35,
            majority: 0.85,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum DatasetKind {
    /// Unit circle in the plane plus isotropic Gaussian noise.
    NoisyCircle,
    /// I.i.d. uniform on `[-1, 1]^2`.
    UniformSquare,
    TwoBlobs(TwoBlobs),
    FromFile(PathBuf),
}

impl DatasetKind {
    /// Parses the canonical kind names. `from-file` needs a path.
    pub fn parse(name: &str, path: Option<PathBuf>) -> Result<Self> {
        match name {
            "noisy-circle" => Ok(DatasetKind::NoisyCircle),
            "uniform-square" => Ok(DatasetKind::UniformSquare),
            "two-blobs" => Ok(DatasetKind::TwoBlobs(TwoBlobs::default())),
            "from-file" => path
                .map(DatasetKind::FromFile)
                .ok_or_else(|| Error::invalid("dataset kind from-file requires a path")),
            other => Err(Error::invalid(format!(
                "unknown dataset kind {other:?} (expected noisy-circle, uniform-square, two-blobs or from-file)"
            ))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            DatasetKind::NoisyCircle => "noisy-circle",
            DatasetKind::UniformSquare => "uniform-square",
            DatasetKind::TwoBlobs(_) => "two-blobs",
            DatasetKind::FromFile(_) => "from-file",
        }
    }
}

/// Generates `n` points. `noise` is the Gaussian standard deviation for the
/// noisy circle and is ignored by the other kinds. For `FromFile` the file is
/// loaded as-is and `n`, `noise` and `seed` are ignored.
pub fn generate_dataset(kind: &DatasetKind, n: usize, noise: f64, seed: RngSeed) -> Result<PointCloud> {
    if let DatasetKind::FromFile(path) = kind {
        return load_points(path);
    }
    if n == 0 {
        return Err(Error::invalid("dataset size n must be at least 1"));
    }
    if !(noise >= 0.0 && noise.is_finite()) {
        return Err(Error::invalid(format!("noise must be a finite nonnegative real, got {noise}")));
    }
    let mut rng = seed.stream(Stream::Dataset);
    let mut coords = Vec::with_capacity(2 * n);
    match kind {
        DatasetKind::NoisyCircle => {
            for _ in 0..n {
                let angle = rng.random::<f64>() * TAU;
                let ex: f64 = rng.sample(StandardNormal);
                let ey: f64 = rng.sample(StandardNormal);
                coords.push(angle.cos() + noise * ex);
                coords.push(angle.sin() + noise * ey);
            }
        }
        DatasetKind::UniformSquare => {
            for _ in 0..2 * n {
                coords.push(rng.random_range(-1.0..=1.0));
            }
        }
        DatasetKind::TwoBlobs(params) => {
            let (cloud, _) = two_blobs_labeled(params, n, seed)?;
            return Ok(cloud);
        }
        DatasetKind::FromFile(_) => unreachable!(),
    }
    PointCloud::from_flat(2, coords)
}

/// Two-cluster mixture together with each point's cluster label (0 = majority).
pub fn two_blobs_labeled(params: &TwoBlobs, n: usize, seed: RngSeed) -> Result<(PointCloud, Vec<u8>)> {
    if n == 0 {
        return Err(Error::invalid("dataset size n must be at least 1"));
    }
    if !(0.0..=1.0).contains(&params.majority) {
        return Err(Error::invalid("two-blobs majority fraction must lie in [0, 1]"));
    }
    let normal = Normal::new(0.0, params.std)
        .map_err(|e| Error::invalid(format!("two-blobs std: {e}")))?;
    let mut rng = seed.stream(Stream::Dataset);
    let mut coords = Vec::with_capacity(2 * n);
    let mut labels = Vec::with_capacity(n);
    for _ in 0..n {
        let label = u8::from(rng.random::<f64>() >= params.majority);
        let c = params.centers[label as usize];
        coords.push(c[0] + normal.sample(&mut rng));
        coords.push(c[1] + normal.sample(&mut rng));
        labels.push(label);
    }
    Ok((PointCloud::from_flat(2, coords)?, labels))
}
