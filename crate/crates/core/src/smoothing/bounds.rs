use crate::cloud::{euclidean, squared_distance};
use crate::error::{Error, Result};

/// Quantities controlling how far the NW field is from interpolation and
/// how fast it can vary.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldBounds {
    /// `rho_i = sum_{j != i} exp(-|x_i - x_j|^2 / 2 sigma^2)`.
    pub rho: Vec<f64>,
    /// `2 M rho_i / (1 + rho_i)`: bound on `|v(x_i) - g_i|`.
    pub anchor_error_bound: Vec<f64>,
    /// `diam * M / sigma^2`: bound on the Jacobian operator norm.
    pub lipschitz_bound: f64,
    /// Largest anchor gradient norm.
    pub max_gradient_norm: f64,
    /// Largest distance between two anchors.
    pub diameter: f64,
}

pub fn field_bounds(dim: usize, anchors: &[f64], gradients: &[f64], sigma: f64) -> Result<FieldBounds> {
    super::check_anchor_data(dim, anchors, gradients, sigma)?;
    if anchors.is_empty() {
        return Err(Error::invalid("bounds need at least one anchor"));
    }
    let m = anchors.len() / dim;
    let point = |i: usize| &anchors[i * dim..(i + 1) * dim];
    let scale = 2.0 * sigma * sigma;

    let mut rho = vec![0.0; m];
    let mut diameter = 0.0f64;
    for i in 0..m {
        for j in 0..m {
            if i != j {
                rho[i] += (-squared_distance(point(i), point(j)) / scale).exp();
                diameter = diameter.max(euclidean(point(i), point(j)));
            }
        }
    }
    let max_gradient_norm = gradients
        .chunks_exact(dim)
        .map(|g| g.iter().map(|c| c * c).sum::<f64>().sqrt())
        .fold(0.0, f64::max);
    let anchor_error_bound = rho
        .iter()
        .map(|&r| 2.0 * max_gradient_norm * r / (1.0 + r))
        .collect();
    Ok(FieldBounds {
        rho,
        anchor_error_bound,
        lipschitz_bound: diameter * max_gradient_norm / (sigma * sigma),
        max_gradient_norm,
        diameter,
    })
}
