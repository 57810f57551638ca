//! Vietoris-Rips persistence with critical-simplex pairing and the sparse
//! topological gradient.

mod gradient;
mod reduce;
mod rips;

use std::io::Write;

pub use gradient::{topological_gradient, SparseGradient};
pub use reduce::{compute_diagrams, compute_persistence, PersistencePair};
pub use rips::{build_rips, Edge, Filtration, FiltrationSimplex, RipsOptions, DEFAULT_SIMPLEX_CAP};

use crate::cloud::PointCloud;
use crate::error::Result;

/// Degree-`k` diagram of a cloud in one call.
pub fn diagram(cloud: &PointCloud, k: usize, threshold: f64, simplex_cap: usize) -> Result<Vec<PersistencePair>> {
    let filtration = build_rips(
        cloud,
        RipsOptions::new(k).threshold(threshold).simplex_cap(simplex_cap),
    )?;
    compute_persistence(&filtration, k)
}

/// Writes `k,birth,death` rows; essential deaths are written as `inf`.
pub fn write_diagram<W: Write>(pairs: &[PersistencePair], out: &mut W) -> std::io::Result<()> {
    for p in pairs {
        if p.death.is_infinite() {
            writeln!(out, "{},{:?},inf", p.dim, p.birth)?;
        } else {
            writeln!(out, "{},{:?},{:?}", p.dim, p.birth, p.death)?;
        }
    }
    Ok(())
}
