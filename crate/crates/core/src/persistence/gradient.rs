//! Chain rule from diagram coordinates to point coordinates.

use std::collections::BTreeMap;

use crate::cloud::PointCloud;
use crate::error::{Error, Result};

use super::reduce::PersistencePair;
use super::rips::Edge;

/// Gradient supported on a few anchor points. Absent indices have gradient
/// exactly zero and stored vectors are never identically zero.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SparseGradient {
    dim: usize,
    entries: BTreeMap<usize, Vec<f64>>,
}

impl SparseGradient {
    pub fn new(dim: usize) -> Self {
        SparseGradient {
            dim,
            entries: BTreeMap::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of anchors.
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, index: usize) -> Option<&[f64]> {
        self.entries.get(&index).map(Vec::as_slice)
    }

    /// Anchor indices in increasing order.
    pub fn anchors(&self) -> impl Iterator<Item = usize> + '_ {
        self.entries.keys().copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &[f64])> + '_ {
        self.entries.iter().map(|(&i, g)| (i, g.as_slice()))
    }

    /// Adds `coef * direction` to the entry of `index`.
    pub fn accumulate(&mut self, index: usize, coef: f64, direction: &[f64]) {
        let entry = self.entries.entry(index).or_insert_with(|| vec![0.0; direction.len()]);
        for (e, d) in entry.iter_mut().zip(direction) {
            *e += coef * d;
        }
    }

    /// Drops entries that cancelled to exactly zero.
    pub fn prune(&mut self) {
        self.entries.retain(|_, g| g.iter().any(|&c| c != 0.0));
    }

    /// Relabels anchor indices through `map` (local index -> global index).
    pub fn remap(self, map: &[usize]) -> SparseGradient {
        let mut out = SparseGradient::new(self.dim);
        for (i, g) in self.entries {
            out.accumulate(map[i], 1.0, &g);
        }
        out.prune();
        out
    }

    /// Sum of two sparse gradients.
    pub fn merge(mut self, other: &SparseGradient) -> SparseGradient {
        for (i, g) in other.iter() {
            self.accumulate(i, 1.0, g);
        }
        self.prune();
        self
    }

    /// Largest Euclidean norm among anchor gradients.
    pub fn max_norm(&self) -> f64 {
        self.entries
            .values()
            .map(|g| g.iter().map(|c| c * c).sum::<f64>().sqrt())
            .fold(0.0, f64::max)
    }

    /// Dense `n x d` row-major copy.
    pub fn to_dense(&self, n: usize) -> Vec<f64> {
        let mut out = vec![0.0; n * self.dim];
        for (&i, g) in &self.entries {
            out[i * self.dim..(i + 1) * self.dim].copy_from_slice(g);
        }
        out
    }
}

/// Chain-rule gradient of a diagram loss with respect to the points.
///
/// `diagram_grads[a]` holds `(dl/db, dl/dd)` for `pairs[a]`. Each critical
/// edge `(p, q)` passes its coefficient along the unit vector from `x_q` to
/// `x_p` to point `p`, and the opposite vector to `q`. Degree-0 births and
/// essential deaths are constant and contribute nothing.
pub fn topological_gradient(
    cloud: &PointCloud,
    pairs: &[PersistencePair],
    diagram_grads: &[(f64, f64)],
) -> Result<SparseGradient> {
    if pairs.len() != diagram_grads.len() {
        return Err(Error::invalid(format!(
            "{} pairs but {} diagram gradients",
            pairs.len(),
            diagram_grads.len()
        )));
    }
    let mut grad = SparseGradient::new(cloud.dim());
    let mut direction = vec![0.0; cloud.dim()];
    for (pair, &(d_birth, d_death)) in pairs.iter().zip(diagram_grads) {
        let edges = [(pair.birth_edge, d_birth), (pair.death_edge, d_death)];
        for (edge, coef) in edges {
            if let Some(edge) = edge {
                if coef != 0.0 {
                    add_edge_term(cloud, edge, coef, &mut grad, &mut direction)?;
                }
            }
        }
    }
    grad.prune();
    Ok(grad)
}

fn add_edge_term(
    cloud: &PointCloud,
    (p, q): Edge,
    coef: f64,
    grad: &mut SparseGradient,
    direction: &mut [f64],
) -> Result<()> {
    if p >= cloud.len() || q >= cloud.len() {
        return Err(Error::invalid(format!("critical edge ({p}, {q}) out of range")));
    }
    let (xp, xq) = (cloud.point(p), cloud.point(q));
    let len = crate::cloud::euclidean(xp, xq);
    if len == 0.0 {
        log::warn!("critical edge ({p}, {q}) has zero length; its gradient contribution is set to 0");
        return Ok(());
    }
    for ((d, a), b) in direction.iter_mut().zip(xp).zip(xq) {
        *d = (a - b) / len;
    }
    grad.accumulate(p, coef, direction);
    grad.accumulate(q, -coef, direction);
    Ok(())
}
