use nalgebra::{DMatrix, SymmetricEigen};

use crate::cloud::squared_distance;
use crate::error::{Error, Result};

use super::{check_anchor_data, check_queries, FieldVariant, SmoothField};

/// Diagonal jitter used when the caller does not pick one: `1e-10 * |I|`.
pub fn default_jitter(num_anchors: usize) -> f64 {
    1e-10 * num_anchors as f64
}

/// Solves `(K + jitter I) a = g` for the Gaussian kernel matrix of the
/// anchors. The matrix-valued kernel is `k(x, y) I_d`, so all `d` coordinates
/// share one Cholesky factorization.
pub fn kernel_solve(
    dim: usize,
    anchors: Vec<f64>,
    gradients: Vec<f64>,
    sigma: f64,
    jitter: Option<f64>,
) -> Result<SmoothField> {
    check_anchor_data(dim, &anchors, &gradients, sigma)?;
    let m = anchors.len() / dim;
    let jitter = jitter.unwrap_or_else(|| default_jitter(m));
    if !(jitter >= 0.0 && jitter.is_finite()) {
        return Err(Error::invalid("jitter must be a nonnegative real"));
    }
    let scale = 2.0 * sigma * sigma;
    let point = |i: usize| &anchors[i * dim..(i + 1) * dim];
    let mut gram = DMatrix::<f64>::zeros(m, m);
    for i in 0..m {
        gram[(i, i)] = 1.0 + jitter;
        for j in 0..i {
            let k = (-squared_distance(point(i), point(j)) / scale).exp();
            gram[(i, j)] = k;
            gram[(j, i)] = k;
        }
    }
    let rhs = DMatrix::from_row_slice(m, dim, &gradients);
    let failure = |gram: DMatrix<f64>| Error::KernelSolve {
        size: m,
        condition: condition_estimate(gram),
    };
    let Some(chol) = gram.clone().cholesky() else {
        return Err(failure(gram));
    };
    let coef = chol.solve(&rhs);
    if coef.iter().any(|c| !c.is_finite()) {
        return Err(failure(gram));
    }
    let residual = (&gram * &coef - &rhs).amax();

    let mut coefficients = Vec::with_capacity(m * dim);
    for i in 0..m {
        coefficients.extend(coef.row(i).iter());
    }
    Ok(SmoothField {
        variant: FieldVariant::Kernel,
        dim,
        anchors,
        gradients,
        sigma,
        coefficients: Some(coefficients),
        residual,
    })
}

fn condition_estimate(gram: DMatrix<f64>) -> f64 {
    let eig = SymmetricEigen::new(gram).eigenvalues;
    let hi = eig.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
    let lo = eig.iter().fold(f64::INFINITY, |a, &b| a.min(b.abs()));
    if lo == 0.0 {
        f64::INFINITY
    } else {
        hi / lo
    }
}

/// `sum_i k(x, x_i) a_i` at every row of `queries`.
pub fn kernel_eval(field: &SmoothField, queries: &[f64]) -> Result<Vec<f64>> {
    let coefficients = field
        .coefficients
        .as_deref()
        .filter(|_| field.variant == FieldVariant::Kernel)
        .ok_or_else(|| Error::invalid("operation requires a kernel field"))?;
    check_queries(field, queries)?;
    let d = field.dim;
    let scale = 2.0 * field.sigma * field.sigma;
    let mut out = vec![0.0; queries.len()];
    for (x, o) in queries.chunks_exact(d).zip(out.chunks_exact_mut(d)) {
        for i in 0..field.num_anchors() {
            let k = (-squared_distance(x, field.anchor(i)) / scale).exp();
            if k == 0.0 {
                continue;
            }
            for (oc, a) in o.iter_mut().zip(&coefficients[i * d..(i + 1) * d]) {
                *oc += k * a;
            }
        }
    }
    Ok(out)
}
