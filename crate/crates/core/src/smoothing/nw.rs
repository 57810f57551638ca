use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::cloud::squared_distance;
use crate::error::{Error, Result};

use super::{check_queries, FieldVariant, SmoothField};

fn require_nw(field: &SmoothField) -> Result<()> {
    if field.variant != FieldVariant::Nw {
        return Err(Error::invalid("operation requires a Nadaraya-Watson field"));
    }
    Ok(())
}

/// Shifted affinities `phi_i(x) / max_j phi_j(x)`, written into `out`.
/// The shift cancels in every normalized quantity and keeps the sum at least 1.
fn shifted_affinities(field: &SmoothField, x: &[f64], out: &mut Vec<f64>) {
    let scale = 2.0 * field.sigma * field.sigma;
    out.clear();
    out.extend((0..field.num_anchors()).map(|i| -squared_distance(x, field.anchor(i)) / scale));
    let top = out.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    out.iter_mut().for_each(|l| *l = (*l - top).exp());
}

/// Normalized weights `w_i(x)`.
pub fn nw_weights(field: &SmoothField, x: &[f64]) -> Vec<f64> {
    let mut w = Vec::with_capacity(field.num_anchors());
    shifted_affinities(field, x, &mut w);
    let z: f64 = w.iter().sum();
    w.iter_mut().for_each(|v| *v /= z);
    w
}

/// Field value at one point, written into `out` (length `dim`).
pub fn nw_eval_point(field: &SmoothField, x: &[f64], scratch: &mut Vec<f64>, out: &mut [f64]) {
    shifted_affinities(field, x, scratch);
    out.iter_mut().for_each(|o| *o = 0.0);
    let mut z = 0.0;
    for (i, &phi) in scratch.iter().enumerate() {
        z += phi;
        for (o, g) in out.iter_mut().zip(field.gradient(i)) {
            *o += phi * g;
        }
    }
    out.iter_mut().for_each(|o| *o /= z);
}

/// Evaluates the NW field at every row of `queries`.
pub fn nw_eval(field: &SmoothField, queries: &[f64]) -> Result<Vec<f64>> {
    require_nw(field)?;
    check_queries(field, queries)?;
    let d = field.dim;
    let mut out = vec![0.0; queries.len()];
    let mut scratch = Vec::with_capacity(field.num_anchors());
    for (x, o) in queries.chunks_exact(d).zip(out.chunks_exact_mut(d)) {
        nw_eval_point(field, x, &mut scratch, o);
    }
    Ok(out)
}

/// `sum_i phi_i(x) |v - g_i|^2`, with the affinities scaled by a common
/// positive factor (which leaves the minimizer and all comparisons intact).
pub fn local_wls_objective(field: &SmoothField, x: &[f64], v: &[f64]) -> f64 {
    let mut phi = Vec::new();
    shifted_affinities(field, x, &mut phi);
    phi.iter()
        .enumerate()
        .map(|(i, &p)| p * squared_distance(v, field.gradient(i)))
        .sum()
}

/// Checks that the field value at `x` is no worse a local constant fit than
/// `trials` random Gaussian perturbations of it.
pub fn nw_local_wls_check<R: Rng + ?Sized>(field: &SmoothField, x: &[f64], trials: usize, rng: &mut R) -> Result<bool> {
    require_nw(field)?;
    let d = field.dim;
    let mut vbar = vec![0.0; d];
    nw_eval_point(field, x, &mut Vec::new(), &mut vbar);
    let best = local_wls_objective(field, x, &vbar);
    let scale = field
        .gradients
        .chunks_exact(d)
        .map(|g| g.iter().map(|c| c * c).sum::<f64>().sqrt())
        .fold(0.0, f64::max)
        .max(1e-3);
    let mut v = vec![0.0; d];
    for _ in 0..trials {
        for (vi, b) in v.iter_mut().zip(&vbar) {
            *vi = b + scale * rng.sample::<f64, _>(StandardNormal);
        }
        if local_wls_objective(field, x, &v) < best {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Analytic Jacobian `D v(x) = sum_i g_i (grad w_i)^T` with
/// `grad w_i = w_i (x_i - xbar) / sigma^2` and `xbar = sum_j w_j x_j`.
pub fn nw_jacobian(field: &SmoothField, x: &[f64]) -> Result<DMatrix<f64>> {
    require_nw(field)?;
    if x.len() != field.dim {
        return Err(Error::Dimension {
            expected: field.dim,
            found: x.len(),
        });
    }
    let d = field.dim;
    let w = nw_weights(field, x);
    let mut barycenter = vec![0.0; d];
    for (i, &wi) in w.iter().enumerate() {
        for (b, a) in barycenter.iter_mut().zip(field.anchor(i)) {
            *b += wi * a;
        }
    }
    let s2 = field.sigma * field.sigma;
    let mut jac = DMatrix::zeros(d, d);
    for (i, &wi) in w.iter().enumerate() {
        let g = field.gradient(i);
        let xi = field.anchor(i);
        for col in 0..d {
            let grad_w = wi * (xi[col] - barycenter[col]) / s2;
            for row in 0..d {
                jac[(row, col)] += g[row] * grad_w;
            }
        }
    }
    Ok(jac)
}
