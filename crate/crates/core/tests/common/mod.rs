//! Helpers shared by the integration tests: seeded clouds and an
//! independent brute-force persistence oracle.

#![allow(dead_code)]

use std::collections::HashMap;

use nwtopo::losses::{loss_diagram_gradient, loss_value, LossKind, LossSpec};
use nwtopo::persistence::{diagram, topological_gradient, PersistencePair, DEFAULT_SIMPLEX_CAP};
use nwtopo::PointCloud;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_cloud<R: Rng>(rng: &mut R, n: usize, dim: usize, half_width: f64) -> PointCloud {
    let coords = (0..n * dim).map(|_| rng.random_range(-half_width..half_width)).collect();
    PointCloud::from_flat(dim, coords).unwrap()
}

/// Smallest gap between distinct pairwise distances. Clouds with a tiny gap
/// are close to a pairing change, where finite differences are meaningless.
pub fn min_distance_gap(cloud: &PointCloud) -> f64 {
    let n = cloud.len();
    let mut d: Vec<f64> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .map(|(i, j)| dist(cloud.point(i), cloud.point(j)))
        .collect();
    d.sort_by(f64::total_cmp);
    d.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min)
}

/// A random cloud whose pairwise distances are all separated by `gap`.
pub fn generic_cloud<R: Rng>(rng: &mut R, n: usize, dim: usize, gap: f64) -> PointCloud {
    loop {
        let c = random_cloud(rng, n, dim, 1.0);
        if min_distance_gap(&c) > gap {
            return c;
        }
    }
}

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    let mut s = 0.0;
    for k in 0..a.len() {
        let t = a[k] - b[k];
        s += t * t;
    }
    s.sqrt()
}

#[derive(Debug, Clone, PartialEq)]
pub struct OraclePair {
    pub dim: usize,
    pub birth: f64,
    pub death: f64,
    pub birth_simplex: Vec<usize>,
    pub death_simplex: Option<Vec<usize>>,
    pub birth_edge: Option<(usize, usize)>,
    pub death_edge: Option<(usize, usize)>,
}

struct Simplex {
    vertices: Vec<usize>,
    value: f64,
    edge: Option<(usize, usize)>,
}

fn subsets(n: usize, size: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, size: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == size {
            out.push(cur.clone());
            return;
        }
        for v in start..n {
            cur.push(v);
            rec(v + 1, n, size, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, size, &mut Vec::new(), &mut out);
    out
}

/// Full Vietoris-Rips persistence by the textbook left-to-right reduction of
/// the complete mod-2 boundary matrix, without any optimization. Returns the
/// pairs of every degree `0..=max_degree`.
pub fn naive_persistence(cloud: &PointCloud, max_degree: usize) -> Vec<OraclePair> {
    let n = cloud.len();
    let mut simplices = Vec::new();
    for size in 1..=max_degree + 2 {
        for vertices in subsets(n, size) {
            let mut value = 0.0;
            let mut edge = None;
            for a in 0..vertices.len() {
                for b in a + 1..vertices.len() {
                    let (p, q) = (vertices[a], vertices[b]);
                    let l = dist(cloud.point(p), cloud.point(q));
                    // Pairs are visited in lexicographic order, so a strict
                    // comparison keeps the smallest edge among ties.
                    if edge.is_none() || l > value {
                        value = l;
                        edge = Some((p, q));
                    }
                }
            }
            simplices.push(Simplex { vertices, value, edge });
        }
    }
    simplices.sort_by(|a, b| {
        a.value
            .partial_cmp(&b.value)
            .unwrap()
            .then(a.vertices.len().cmp(&b.vertices.len()))
            .then(a.vertices.cmp(&b.vertices))
    });
    let index: HashMap<Vec<usize>, usize> =
        simplices.iter().enumerate().map(|(i, s)| (s.vertices.clone(), i)).collect();

    let m = simplices.len();
    let mut columns: Vec<Vec<bool>> = Vec::with_capacity(m);
    for s in &simplices {
        let mut col = vec![false; m];
        if s.vertices.len() > 1 {
            for skip in 0..s.vertices.len() {
                let face: Vec<usize> = s
                    .vertices
                    .iter()
                    .enumerate()
                    .filter(|&(i, _)| i != skip)
                    .map(|(_, &v)| v)
                    .collect();
                col[index[&face]] = true;
            }
        }
        columns.push(col);
    }
    let low = |col: &Vec<bool>| col.iter().rposition(|&x| x);
    for j in 0..m {
        loop {
            let Some(l) = low(&columns[j]) else { break };
            let Some(other) = (0..j).find(|&i| low(&columns[i]) == Some(l)) else { break };
            let add = columns[other].clone();
            for (x, y) in columns[j].iter_mut().zip(add) {
                *x ^= y;
            }
        }
    }

    let mut paired = vec![false; m];
    let mut pairs = Vec::new();
    for j in 0..m {
        if let Some(i) = low(&columns[j]) {
            paired[i] = true;
            paired[j] = true;
            let b = &simplices[i];
            let d = &simplices[j];
            if b.vertices.len() - 1 <= max_degree {
                pairs.push(OraclePair {
                    dim: b.vertices.len() - 1,
                    birth: b.value,
                    death: d.value,
                    birth_simplex: b.vertices.clone(),
                    death_simplex: Some(d.vertices.clone()),
                    birth_edge: b.edge,
                    death_edge: d.edge,
                });
            }
        }
    }
    for (i, s) in simplices.iter().enumerate() {
        let dim = s.vertices.len() - 1;
        if !paired[i] && low(&columns[i]).is_none() && dim <= max_degree {
            pairs.push(OraclePair {
                dim,
                birth: s.value,
                death: f64::INFINITY,
                birth_simplex: s.vertices.clone(),
                death_simplex: None,
                birth_edge: s.edge,
                death_edge: None,
            });
        }
    }
    pairs
}

/// Sorted `(birth, death)` multiset of one degree.
pub fn sorted_values(pairs: impl IntoIterator<Item = (f64, f64)>) -> Vec<(f64, f64)> {
    let mut v: Vec<(f64, f64)> = pairs.into_iter().collect();
    v.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    v
}

/// Largest coordinate difference between two clouds of the same shape.
pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

pub fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Central finite-difference gradient of `f` at `x`.
pub fn fd_gradient(x: &[f64], step: f64, mut f: impl FnMut(&[f64]) -> f64) -> Vec<f64> {
    let mut y = x.to_vec();
    (0..x.len())
        .map(|i| {
            y[i] = x[i] + step;
            let plus = f(&y);
            y[i] = x[i] - step;
            let minus = f(&y);
            y[i] = x[i];
            (plus - minus) / (2.0 * step)
        })
        .collect()
}

/// A uniformly random rotation of R^d (QR of a Gaussian matrix, sign-fixed).
pub fn random_rotation<R: Rng>(rng: &mut R, dim: usize) -> nalgebra::DMatrix<f64> {
    use rand_distr::StandardNormal;
    let g = nalgebra::DMatrix::from_fn(dim, dim, |_, _| rng.sample::<f64, _>(StandardNormal));
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..dim {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    q
}

pub fn transform(cloud: &PointCloud, rot: &nalgebra::DMatrix<f64>, shift: &[f64]) -> PointCloud {
    let d = cloud.dim();
    let mut out = Vec::with_capacity(cloud.as_flat().len());
    for p in cloud.points() {
        let v = rot * nalgebra::DVector::from_column_slice(p);
        out.extend((0..d).map(|k| v[k] + shift[k]));
    }
    PointCloud::from_flat(d, out).unwrap()
}

/// Exact equality of two pair multisets, including the birth/death simplices
/// and critical edges.
pub fn same_pairs(ours: &[PersistencePair], oracle: &[OraclePair]) -> bool {
    let key = |s: &Vec<usize>| s.clone();
    let mut a: Vec<_> = ours
        .iter()
        .map(|p| (p.dim, key(&p.birth_simplex), p.death_simplex.clone(), p.birth, p.death, p.birth_edge, p.death_edge))
        .collect();
    let mut b: Vec<_> = oracle
        .iter()
        .map(|p| (p.dim, key(&p.birth_simplex), p.death_simplex.clone(), p.birth, p.death, p.birth_edge, p.death_edge))
        .collect();
    a.sort_by(|x, y| (x.0, &x.1).cmp(&(y.0, &y.1)));
    b.sort_by(|x, y| (x.0, &x.1).cmp(&(y.0, &y.1)));
    a == b
}

pub fn diagram_loss(dim: usize, spec: &LossSpec, x: &[f64]) -> f64 {
    let cloud = PointCloud::from_flat(dim, x.to_vec()).unwrap();
    loss_value(&diagram(&cloud, spec.k, f64::INFINITY, DEFAULT_SIMPLEX_CAP).unwrap(), spec)
}

pub fn chain_rule(cloud: &PointCloud, spec: &LossSpec) -> Vec<f64> {
    let pairs = diagram(cloud, spec.k, f64::INFINITY, DEFAULT_SIMPLEX_CAP).unwrap();
    let grads = loss_diagram_gradient(&pairs, spec);
    topological_gradient(cloud, &pairs, &grads).unwrap().to_dense(cloud.len())
}

/// Worst relative error of the chain-rule gradient against central finite
/// differences over 20 generic clouds with n = 15 in the plane.
pub fn gradient_check(kind: LossKind) -> f64 {
    let spec = LossSpec::new(kind, 1);
    let mut worst: f64 = 0.0;
    for seed in 0..20u64 {
        let mut r = rng(1000 + seed);
        let cloud = generic_cloud(&mut r, 15, 2, 1e-4);
        let analytic = chain_rule(&cloud, &spec);
        let numeric = fd_gradient(cloud.as_flat(), 1e-6, |x| diagram_loss(2, &spec, x));
        let diff: Vec<f64> = analytic.iter().zip(&numeric).map(|(a, b)| a - b).collect();
        let scale = norm(&analytic).max(1e-12);
        worst = worst.max(norm(&diff) / scale);
    }
    worst
}
