//! Per-iteration subsample selection.
//!
//! Two samplers are provided: uniform sampling without replacement, and
//! projection-stratified sampling ("random slicing"), which projects the cloud
//! on a random direction, sorts the projections, and keeps the points at
//! evenly spaced ranks.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::cloud::PointCloud;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Sampler {
    Uniform,
    Slicing,
}

impl Sampler {
    pub fn name(self) -> &'static str {
        match self {
            Sampler::Uniform => "uniform",
            Sampler::Slicing => "slicing",
        }
    }

    pub fn draw<R: Rng + ?Sized>(self, cloud: &PointCloud, s: usize, rng: &mut R) -> Result<SubsampleIndices> {
        match self {
            Sampler::Uniform => uniform_subsample(cloud, s, rng),
            Sampler::Slicing => random_slice(cloud, s, rng),
        }
    }
}

impl std::str::FromStr for Sampler {
    type Err = Error;

    fn from_str(name: &str) -> Result<Self> {
        match name {
            "uniform" => Ok(Sampler::Uniform),
            "slicing" => Ok(Sampler::Slicing),
            other => Err(Error::invalid(format!("unknown sampler {other:?} (expected uniform or slicing)"))),
        }
    }
}

/// Indices selected for one persistence computation.
#[derive(Debug, Clone, PartialEq)]
pub struct SubsampleIndices {
    pub indices: Vec<usize>,
    /// Unit slicing direction; `None` for uniform draws.
    pub direction: Option<Vec<f64>>,
}

impl SubsampleIndices {
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// All indices of a cloud of size `n`, in order.
    pub fn full(n: usize) -> Self {
        SubsampleIndices {
            indices: (0..n).collect(),
            direction: None,
        }
    }
}

/// The selected ranks `floor(k (n-1) / (s-1))` for `k = 0..s`.
pub fn slice_ranks(n: usize, s: usize) -> Result<Vec<usize>> {
    if s < 2 {
        return Err(Error::invalid(format!("slicing needs s >= 2, got {s}")));
    }
    if s > n {
        return Err(Error::invalid(format!("subsample size {s} exceeds cloud size {n}")));
    }
    let (num, den) = ((n - 1) as u128, (s - 1) as u128);
    Ok((0..s as u128).map(|k| (k * num / den) as usize).collect())
}

/// Largest gap between consecutive selected ranks.
pub fn max_rank_gap(n: usize, s: usize) -> Result<usize> {
    let ranks = slice_ranks(n, s)?;
    Ok(ranks.windows(2).map(|w| w[1] - w[0]).max().unwrap_or(0))
}

/// Projection-stratified subsampling with a fresh Gaussian direction.
pub fn random_slice<R: Rng + ?Sized>(cloud: &PointCloud, s: usize, rng: &mut R) -> Result<SubsampleIndices> {
    // Validate before drawing so that failures do not consume randomness.
    slice_ranks(cloud.len(), s)?;
    let direction = loop {
        let mut u: Vec<f64> = (0..cloud.dim()).map(|_| rng.sample(StandardNormal)).collect();
        let norm = u.iter().map(|c| c * c).sum::<f64>().sqrt();
        if norm > 0.0 && norm.is_finite() {
            u.iter_mut().for_each(|c| *c /= norm);
            break u;
        }
    };
    slice_along(cloud, s, &direction)
}

/// Projection-stratified subsampling along a given direction, normalized here.
pub fn slice_along(cloud: &PointCloud, s: usize, direction: &[f64]) -> Result<SubsampleIndices> {
    Ok(slice_with_stats(cloud, s, direction)?.0)
}

/// Work done by one slicing call.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SliceStats {
    pub projections: usize,
    pub comparisons: usize,
}

/// Slicing that also reports how many projections and sort comparisons it
/// performed.
pub fn slice_with_stats(cloud: &PointCloud, s: usize, direction: &[f64]) -> Result<(SubsampleIndices, SliceStats)> {
    if direction.len() != cloud.dim() {
        return Err(Error::Dimension {
            expected: cloud.dim(),
            found: direction.len(),
        });
    }
    let norm = direction.iter().map(|c| c * c).sum::<f64>().sqrt();
    if !(norm > 0.0 && norm.is_finite()) {
        return Err(Error::invalid("slicing direction must be a nonzero finite vector"));
    }
    let u: Vec<f64> = direction.iter().map(|c| c / norm).collect();
    let ranks = slice_ranks(cloud.len(), s)?;

    let mut stats = SliceStats::default();
    let t: Vec<f64> = cloud
        .points()
        .map(|p| {
            stats.projections += 1;
            p.iter().zip(&u).map(|(a, b)| a * b).sum()
        })
        .collect();
    let mut order: Vec<usize> = (0..cloud.len()).collect();
    // Stable: equal projections keep their original index order.
    order.sort_by(|&a, &b| {
        stats.comparisons += 1;
        t[a].total_cmp(&t[b])
    });
    let indices = ranks.into_iter().map(|r| order[r]).collect();
    Ok((
        SubsampleIndices {
            indices,
            direction: Some(u),
        },
        stats,
    ))
}

/// `s` distinct indices drawn uniformly without replacement, returned sorted.
pub fn uniform_subsample<R: Rng + ?Sized>(cloud: &PointCloud, s: usize, rng: &mut R) -> Result<SubsampleIndices> {
    let n = cloud.len();
    if s == 0 {
        return Err(Error::invalid("subsample size must be at least 1"));
    }
    if s > n {
        return Err(Error::invalid(format!("subsample size {s} exceeds cloud size {n}")));
    }
    let mut indices = rand::seq::index::sample(rng, n, s).into_vec();
    indices.sort_unstable();
    Ok(SubsampleIndices {
        indices,
        direction: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{RngSeed, Stream};

    fn line(n: usize) -> PointCloud {
        PointCloud::from_flat(2, (0..n).flat_map(|i| [i as f64, 0.0]).collect()).unwrap()
    }

    #[test]
    fn collinear_ranks() {
        let cloud = line(10);
        let sub = slice_along(&cloud, 4, &[1.0, 0.0]).unwrap();
        assert_eq!(sub.indices, vec![0, 3, 6, 9]);
        // Reversed direction selects the same points, ordered by projection.
        let sub = slice_along(&cloud, 4, &[-2.0, 0.0]).unwrap();
        assert_eq!(sub.indices, vec![9, 6, 3, 0]);
    }

    #[test]
    fn s_equals_n_and_s_two() {
        let cloud = line(7);
        let mut rng = RngSeed(1).stream(Stream::Testing);
        let mut all = random_slice(&cloud, 7, &mut rng).unwrap().indices;
        all.sort_unstable();
        assert_eq!(all, (0..7).collect::<Vec<_>>());

        let sub = slice_along(&cloud, 2, &[1.0, 0.3]).unwrap();
        assert_eq!(sub.indices, vec![0, 6]);
    }

    #[test]
    fn direction_is_unit() {
        let cloud = line(20);
        let mut rng = RngSeed(2).stream(Stream::Testing);
        for _ in 0..50 {
            let u = random_slice(&cloud, 5, &mut rng).unwrap().direction.unwrap();
            let norm: f64 = u.iter().map(|c| c * c).sum::<f64>().sqrt();
            assert!((norm - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn size_errors() {
        let cloud = line(5);
        let mut rng = RngSeed(0).stream(Stream::Testing);
        assert!(random_slice(&cloud, 1, &mut rng).is_err());
        assert!(random_slice(&cloud, 6, &mut rng).is_err());
        assert!(uniform_subsample(&cloud, 6, &mut rng).is_err());
        assert!(max_rank_gap(4, 1).is_err());
    }

    #[test]
    fn rank_gap_examples() {
        assert_eq!(max_rank_gap(10, 4).unwrap(), 3);
        assert_eq!(max_rank_gap(7, 3).unwrap(), 3);
        assert_eq!(max_rank_gap(12, 12).unwrap(), 1);
    }

    #[test]
    fn uniform_edge_cases() {
        let cloud = line(9);
        let mut rng = RngSeed(4).stream(Stream::Testing);
        let all = uniform_subsample(&cloud, 9, &mut rng).unwrap();
        assert_eq!(all.indices, (0..9).collect::<Vec<_>>());
        let one = uniform_subsample(&cloud, 1, &mut rng).unwrap();
        assert_eq!(one.len(), 1);
        assert!(one.indices[0] < 9);
    }

    #[test]
    fn slicing_work_is_one_pass_and_one_sort() {
        let cloud = line(1000);
        let (_, stats) = slice_with_stats(&cloud, 100, &[0.6, 0.8]).unwrap();
        assert_eq!(stats.projections, 1000);
        let n = 1000f64;
        assert!((stats.comparisons as f64) <= n * n.log2(), "{stats:?}");
    }
}
