//! Persistence-diagram losses and the box penalty.

use serde::{Deserialize, Serialize};

use crate::cloud::PointCloud;
use crate::error::{Error, Result};
use crate::persistence::{self, topological_gradient, PersistencePair, SparseGradient};
use crate::subsample::SubsampleIndices;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LossKind {
    /// `sum pers^2`.
    Simplification,
    /// `-sum (pers / 2)^2`.
    Augmentation,
    /// `sum (death + birth)^2`.
    Collapser,
    /// Augmentation in degree 1 with a box penalty on `[-1, 1]^2`.
    Maxpers2d,
    /// Augmentation in degree 2 with a box penalty on `[-1, 1]^3`.
    Bunny,
}

impl LossKind {
    pub fn name(self) -> &'static str {
        match self {
            LossKind::Simplification => "simplification",
            LossKind::Augmentation => "augmentation",
            LossKind::Collapser => "collapser",
            LossKind::Maxpers2d => "maxpers2d",
            LossKind::Bunny => "bunny",
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        Ok(match name {
            "simplification" => LossKind::Simplification,
            "augmentation" => LossKind::Augmentation,
            "collapser" => LossKind::Collapser,
            "maxpers2d" => LossKind::Maxpers2d,
            "bunny" => LossKind::Bunny,
            other => return Err(Error::invalid(format!("unknown loss kind {other:?}"))),
        })
    }
}

impl std::str::FromStr for LossKind {
    type Err = Error;

    fn from_str(name: &str) -> Result<Self> {
        LossKind::parse(name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossSpec {
    pub kind: LossKind,
    /// Homology degree.
    pub k: usize,
    /// Restrict the sum to the `top_m` most persistent pairs.
    pub top_m: Option<usize>,
    /// Box half-width for the hinge penalty; `None` disables it.
    pub box_bound: Option<f64>,
    pub box_weight: f64,
}

impl LossSpec {
    pub fn new(kind: LossKind, k: usize) -> Self {
        LossSpec {
            kind,
            k,
            top_m: None,
            box_bound: None,
            box_weight: 1.0,
        }
    }

    /// The kind's usual degree and box settings.
    pub fn preset(kind: LossKind) -> Self {
        match kind {
            LossKind::Simplification | LossKind::Augmentation | LossKind::Collapser => LossSpec::new(kind, 1),
            LossKind::Maxpers2d => LossSpec {
                box_bound: Some(1.0),
                ..LossSpec::new(kind, 1)
            },
            LossKind::Bunny => LossSpec {
                box_bound: Some(1.0),
                ..LossSpec::new(kind, 2)
            },
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.top_m == Some(0) {
            return Err(Error::invalid("top_m must be at least 1"));
        }
        if let Some(b) = self.box_bound {
            if !(b > 0.0 && b.is_finite()) {
                return Err(Error::invalid("box_bound must be a positive real"));
            }
        }
        if !self.box_weight.is_finite() {
            return Err(Error::invalid("box_weight must be finite"));
        }
        Ok(())
    }
}

/// Indices of the pairs that enter the loss: finite, nonzero persistence,
/// optionally the `top_m` most persistent (ties: smaller birth, then input order).
pub fn selected_pairs(pairs: &[PersistencePair], spec: &LossSpec) -> Vec<usize> {
    let mut chosen: Vec<usize> = (0..pairs.len())
        .filter(|&a| pairs[a].dim == spec.k && pairs[a].death.is_finite() && !pairs[a].is_zero_persistence())
        .collect();
    if let Some(m) = spec.top_m {
        chosen.sort_by(|&a, &b| {
            pairs[b]
                .persistence()
                .total_cmp(&pairs[a].persistence())
                .then(pairs[a].birth.total_cmp(&pairs[b].birth))
                .then(a.cmp(&b))
        });
        chosen.truncate(m);
        chosen.sort_unstable();
    }
    chosen
}

/// Loss term and `(dl/db, dl/dd)` for a single diagram point.
fn pair_term(kind: LossKind, birth: f64, death: f64) -> (f64, f64, f64) {
    match kind {
        LossKind::Simplification => {
            let p = death - birth;
            (p * p, -2.0 * p, 2.0 * p)
        }
        LossKind::Augmentation | LossKind::Maxpers2d | LossKind::Bunny => {
            let h = 0.5 * (death - birth);
            (-h * h, h, -h)
        }
        LossKind::Collapser => {
            let s = death + birth;
            (s * s, 2.0 * s, 2.0 * s)
        }
    }
}

pub fn loss_value(pairs: &[PersistencePair], spec: &LossSpec) -> f64 {
    selected_pairs(pairs, spec)
        .into_iter()
        .map(|a| pair_term(spec.kind, pairs[a].birth, pairs[a].death).0)
        .sum()
}

/// Per-pair `(dl/db, dl/dd)`, aligned with `pairs`; unselected pairs get zeros.
pub fn loss_diagram_gradient(pairs: &[PersistencePair], spec: &LossSpec) -> Vec<(f64, f64)> {
    let mut grads = vec![(0.0, 0.0); pairs.len()];
    for a in selected_pairs(pairs, spec) {
        let (_, db, dd) = pair_term(spec.kind, pairs[a].birth, pairs[a].death);
        grads[a] = (db, dd);
    }
    grads
}

/// `weight * sum_i max(|x_i|_inf - bound, 0)` and its gradient.
///
/// Outside the box the gradient is `weight * sign` on the coordinate that
/// attains the sup norm (lowest axis on ties). On the boundary it is zero.
pub fn box_penalty(cloud: &PointCloud, bound: f64, weight: f64) -> Result<(f64, SparseGradient)> {
    if !(bound > 0.0) {
        return Err(Error::invalid("box bound must be positive"));
    }
    let mut value = 0.0;
    let mut grad = SparseGradient::new(cloud.dim());
    let mut unit = vec![0.0; cloud.dim()];
    for (i, p) in cloud.points().enumerate() {
        let (axis, mag) = p
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |best, (a, &c)| if c.abs() > best.1 { (a, c.abs()) } else { best });
        let excess = mag - bound;
        if excess > 0.0 {
            value += weight * excess;
            unit.iter_mut().for_each(|u| *u = 0.0);
            unit[axis] = p[axis].signum();
            grad.accumulate(i, weight, &unit);
        }
    }
    grad.prune();
    Ok((value, grad))
}

/// Everything one loss evaluation produces.
#[derive(Debug, Clone)]
pub struct LossEvaluation {
    pub value: f64,
    /// Diagram part of the value, before the box penalty.
    pub topological: f64,
    pub gradient: SparseGradient,
    pub pairs: Vec<PersistencePair>,
}

/// Options forwarded to the Rips construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PersistenceOptions {
    pub threshold: f64,
    pub simplex_cap: usize,
}

impl Default for PersistenceOptions {
    fn default() -> Self {
        PersistenceOptions {
            threshold: f64::INFINITY,
            simplex_cap: persistence::DEFAULT_SIMPLEX_CAP,
        }
    }
}

/// Diagram loss on the subsampled points only, without the box penalty,
/// with its sparse gradient indexed in the full cloud.
pub fn topological_loss(
    cloud: &PointCloud,
    subsample: &SubsampleIndices,
    spec: &LossSpec,
    options: PersistenceOptions,
) -> Result<(f64, SparseGradient, Vec<PersistencePair>)> {
    if let Some(&bad) = subsample.indices.iter().find(|&&i| i >= cloud.len()) {
        return Err(Error::invalid(format!("subsample index {bad} out of range")));
    }
    let local = cloud.select(&subsample.indices);
    let pairs = persistence::diagram(&local, spec.k, options.threshold, options.simplex_cap)?;
    let value = loss_value(&pairs, spec);
    let grads = loss_diagram_gradient(&pairs, spec);
    let gradient = topological_gradient(&local, &pairs, &grads)?.remap(&subsample.indices);
    Ok((value, gradient, pairs))
}

/// Full loss: diagram loss of the subsample plus the box penalty over the
/// whole cloud when the loss enables it.
pub fn total_loss_and_sparse_gradient(
    cloud: &PointCloud,
    subsample: &SubsampleIndices,
    spec: &LossSpec,
    options: PersistenceOptions,
) -> Result<LossEvaluation> {
    spec.validate()?;
    let (topological, mut gradient, pairs) = topological_loss(cloud, subsample, spec, options)?;
    let mut value = topological;
    if let Some(bound) = spec.box_bound {
        let (penalty, box_grad) = box_penalty(cloud, bound, spec.box_weight)?;
        value += penalty;
        gradient = gradient.merge(&box_grad);
    }
    Ok(LossEvaluation {
        value,
        topological,
        gradient,
        pairs,
    })
}
