//! Persistence pairing by coboundary-matrix reduction with clearing.
//!
//! Columns of degree `k` are the `k`-simplices in reverse filtration order;
//! each column holds the positions of its cofacets. The pivot of a column is
//! its earliest cofacet. The resulting pairs coincide with the pairs of the
//! ordinary boundary-matrix reduction under the same total order.

use crate::error::{Error, Result};

use super::rips::{Edge, Filtration};

const NONE: u32 = u32::MAX;

/// One point of a persistence diagram together with the simplices that
/// create and destroy it.
#[derive(Debug, Clone, PartialEq)]
pub struct PersistencePair {
    pub dim: usize,
    pub birth: f64,
    /// `f64::INFINITY` for essential classes.
    pub death: f64,
    /// Longest edge of the creating simplex; `None` in degree 0.
    pub birth_edge: Option<Edge>,
    /// Longest edge of the destroying simplex; `None` for essential classes.
    pub death_edge: Option<Edge>,
    pub birth_simplex: Vec<usize>,
    pub death_simplex: Option<Vec<usize>>,
}

impl PersistencePair {
    pub fn persistence(&self) -> f64 {
        self.death - self.birth
    }

    pub fn is_essential(&self) -> bool {
        self.death_simplex.is_none()
    }

    /// Birth and death happen at the same scale.
    pub fn is_zero_persistence(&self) -> bool {
        self.death == self.birth
    }
}

/// Persistence pairs of degree `k`.
pub fn compute_persistence(filtration: &Filtration, k: usize) -> Result<Vec<PersistencePair>> {
    Ok(compute_diagrams(filtration, k)?.pop().unwrap_or_default())
}

/// Persistence pairs of every degree `0..=max_degree`, indexed by degree.
pub fn compute_diagrams(filtration: &Filtration, max_degree: usize) -> Result<Vec<Vec<PersistencePair>>> {
    if max_degree > filtration.maxdim() {
        return Err(Error::InsufficientDepth {
            degree: max_degree,
            needed: max_degree + 1,
            available: filtration.maxdim() + 1,
        });
    }
    let mut diagrams = Vec::with_capacity(max_degree + 1);
    let mut cleared = vec![false; filtration.count(0)];
    for degree in 0..=max_degree {
        let (pairs, next_cleared) = reduce_degree(filtration, degree, &cleared);
        diagrams.push(pairs);
        cleared = next_cleared;
    }
    Ok(diagrams)
}

fn reduce_degree(f: &Filtration, degree: usize, cleared: &[bool]) -> (Vec<PersistencePair>, Vec<bool>) {
    let cols = &f.levels[degree];
    let rows = &f.levels[degree + 1];
    let mut pivot_owner = vec![NONE; rows.len()];
    let mut stored: Vec<Vec<u32>> = Vec::new();
    let mut pairs = Vec::new();
    let mut column = Vec::new();
    let mut scratch = Vec::new();

    for col in (0..cols.len()).rev() {
        if cleared[col] {
            continue;
        }
        coboundary(f, degree, col, &mut column);
        loop {
            let Some(&pivot) = column.first() else {
                pairs.push(make_pair(f, degree, col, None));
                break;
            };
            match pivot_owner[pivot as usize] {
                NONE => {
                    pivot_owner[pivot as usize] = stored.len() as u32;
                    pairs.push(make_pair(f, degree, col, Some(pivot as usize)));
                    stored.push(std::mem::take(&mut column));
                    break;
                }
                owner => {
                    symmetric_difference(&column, &stored[owner as usize], &mut scratch);
                    std::mem::swap(&mut column, &mut scratch);
                }
            }
        }
    }
    let next_cleared = pivot_owner.iter().map(|&o| o != NONE).collect();
    (pairs, next_cleared)
}

fn make_pair(f: &Filtration, degree: usize, birth: usize, death: Option<usize>) -> PersistencePair {
    let b = f.simplex(degree, birth);
    let d = death.map(|pos| f.simplex(degree + 1, pos));
    PersistencePair {
        dim: degree,
        birth: b.value,
        death: d.as_ref().map_or(f64::INFINITY, |d| d.value),
        birth_edge: b.critical_edge,
        death_edge: d.as_ref().and_then(|d| d.critical_edge),
        birth_simplex: b.vertices,
        death_simplex: d.map(|d| d.vertices),
    }
}

/// Positions of the cofacets of `(dim, pos)`, sorted increasingly.
fn coboundary(f: &Filtration, dim: usize, pos: usize, out: &mut Vec<u32>) {
    out.clear();
    let level = &f.levels[dim];
    let cofaces = &f.levels[dim + 1];
    let vertices = level.vertices(pos);
    let w = vertices.len();
    let bin = &f.binomials;

    // Inserting vertex `v` at sorted position `p` keeps the colex terms of
    // the vertices below it and shifts the ones above it by one slot.
    let mut below = 0u64;
    let mut above: u64 = vertices
        .iter()
        .enumerate()
        .map(|(t, &u)| bin.get(u as usize, t + 2))
        .sum();
    let mut p = 0usize;
    for v in 0..f.num_points() {
        if p < w && vertices[p] as usize == v {
            below += bin.get(v, p + 1);
            above -= bin.get(v, p + 2);
            p += 1;
            continue;
        }
        let rank = below + bin.get(v, p + 1) + above;
        if let Some(c) = cofaces.position(rank) {
            out.push(c);
        }
    }
    out.sort_unstable();
}

fn symmetric_difference(a: &[u32], b: &[u32], out: &mut Vec<u32>) {
    out.clear();
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
}
