//! Extension of a sparse gradient to an ambient vector field.
//!
//! Two extensions share the [`SmoothField`] type:
//!
//! * `Nw`: the Nadaraya-Watson field `v(x) = sum_i w_i(x) g_i` with normalized
//!   Gaussian weights `w_i = phi_i / sum_j phi_j`,
//!   `phi_i(x) = exp(-|x - x_i|^2 / 2 sigma^2)`. It is a convex combination of
//!   the anchor gradients everywhere, including far from the anchors.
//! * `Kernel`: exact Gaussian-RKHS interpolation
//!   `v(x) = sum_i k(x, x_i) a_i` with `K a = g`, which matches the anchors
//!   and decays away from them.

mod bounds;
mod kernel;
mod nw;
mod presets;

pub use bounds::{field_bounds, FieldBounds};
pub use kernel::{default_jitter, kernel_eval, kernel_solve};
pub use nw::{local_wls_objective, nw_eval, nw_eval_point, nw_jacobian, nw_local_wls_check, nw_weights};
pub use presets::{grid_dump, write_grid, FieldPreset, GridWindow, PRESET_NAMES};

use crate::cloud::PointCloud;
use crate::error::{Error, Result};
use crate::persistence::SparseGradient;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldVariant {
    Nw,
    Kernel,
}

/// An ambient field built from anchor positions, anchor gradients and a
/// bandwidth. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct SmoothField {
    variant: FieldVariant,
    dim: usize,
    anchors: Vec<f64>,
    gradients: Vec<f64>,
    sigma: f64,
    coefficients: Option<Vec<f64>>,
    residual: f64,
}

impl SmoothField {
    /// Nadaraya-Watson field on the given anchors (row-major, `dim` columns).
    pub fn nw(dim: usize, anchors: Vec<f64>, gradients: Vec<f64>, sigma: f64) -> Result<Self> {
        check_anchor_data(dim, &anchors, &gradients, sigma)?;
        Ok(SmoothField {
            variant: FieldVariant::Nw,
            dim,
            anchors,
            gradients,
            sigma,
            coefficients: None,
            residual: 0.0,
        })
    }

    /// NW field whose anchors are the support of `gradient` inside `cloud`.
    pub fn nw_from_sparse(cloud: &PointCloud, gradient: &SparseGradient, sigma: f64) -> Result<Self> {
        let (anchors, gradients) = anchor_arrays(cloud, gradient);
        SmoothField::nw(cloud.dim(), anchors, gradients, sigma)
    }

    pub fn variant(&self) -> FieldVariant {
        self.variant
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn num_anchors(&self) -> usize {
        self.anchors.len() / self.dim
    }

    pub fn anchor(&self, i: usize) -> &[f64] {
        &self.anchors[i * self.dim..(i + 1) * self.dim]
    }

    pub fn gradient(&self, i: usize) -> &[f64] {
        &self.gradients[i * self.dim..(i + 1) * self.dim]
    }

    pub fn anchors_flat(&self) -> &[f64] {
        &self.anchors
    }

    pub fn gradients_flat(&self) -> &[f64] {
        &self.gradients
    }

    /// Kernel coefficients `a`, row-major; `None` for NW fields.
    pub fn coefficients(&self) -> Option<&[f64]> {
        self.coefficients.as_deref()
    }

    /// `max |K a - g|` of the kernel solve; zero for NW fields.
    pub fn residual(&self) -> f64 {
        self.residual
    }

    /// Same anchors, new gradients.
    pub fn with_gradients(&self, gradients: Vec<f64>) -> Result<Self> {
        match self.variant {
            FieldVariant::Nw => SmoothField::nw(self.dim, self.anchors.clone(), gradients, self.sigma),
            FieldVariant::Kernel => kernel_solve(self.dim, self.anchors.clone(), gradients, self.sigma, None),
        }
    }

    /// Evaluates either variant at row-major `queries`.
    pub fn eval(&self, queries: &[f64]) -> Result<Vec<f64>> {
        match self.variant {
            FieldVariant::Nw => nw_eval(self, queries),
            FieldVariant::Kernel => kernel_eval(self, queries),
        }
    }
}

/// Anchor positions and gradients of a sparse gradient, in anchor order.
pub fn anchor_arrays(cloud: &PointCloud, gradient: &SparseGradient) -> (Vec<f64>, Vec<f64>) {
    let mut anchors = Vec::with_capacity(gradient.len() * cloud.dim());
    let mut gradients = Vec::with_capacity(gradient.len() * cloud.dim());
    for (i, g) in gradient.iter() {
        anchors.extend_from_slice(cloud.point(i));
        gradients.extend_from_slice(g);
    }
    (anchors, gradients)
}

fn check_anchor_data(dim: usize, anchors: &[f64], gradients: &[f64], sigma: f64) -> Result<()> {
    if dim == 0 {
        return Err(Error::invalid("field dimension must be at least 1"));
    }
    if anchors.is_empty() {
        return Err(Error::invalid("a smooth field needs at least one anchor"));
    }
    if anchors.len() % dim != 0 || anchors.len() != gradients.len() {
        return Err(Error::invalid("anchor and gradient arrays do not match"));
    }
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::invalid(format!("bandwidth must be a positive real, got {sigma}")));
    }
    if anchors.iter().chain(gradients).any(|c| !c.is_finite()) {
        return Err(Error::invalid("anchor data must be finite"));
    }
    Ok(())
}

fn check_queries(field: &SmoothField, queries: &[f64]) -> Result<()> {
    if queries.len() % field.dim != 0 {
        return Err(Error::Dimension {
            expected: field.dim,
            found: queries.len() % field.dim,
        });
    }
    Ok(())
}
