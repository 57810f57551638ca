//! Vietoris-Rips filtration construction.

use std::collections::HashMap;

use crate::cloud::PointCloud;
use crate::error::{Error, Result};

/// Default ceiling on the number of simplices a filtration may hold.
pub const DEFAULT_SIMPLEX_CAP: usize = 5_000_000;

/// Dense rank lookup tables are used while the number of possible
/// simplices of a dimension stays below this size.
const DENSE_LOOKUP_LIMIT: u64 = 1 << 24;

const ABSENT: u32 = u32::MAX;

pub type Edge = (usize, usize);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RipsOptions {
    /// Highest homology degree that will be queried; simplices up to
    /// dimension `maxdim + 1` are built.
    pub maxdim: usize,
    /// Largest admissible filtration value. `f64::INFINITY` keeps every simplex.
    pub threshold: f64,
    pub simplex_cap: usize,
}

impl RipsOptions {
    pub fn new(maxdim: usize) -> Self {
        RipsOptions {
            maxdim,
            threshold: f64::INFINITY,
            simplex_cap: DEFAULT_SIMPLEX_CAP,
        }
    }

    pub fn threshold(mut self, threshold: f64) -> Self {
        self.threshold = threshold;
        self
    }

    pub fn simplex_cap(mut self, cap: usize) -> Self {
        self.simplex_cap = cap;
        self
    }
}

/// One simplex of the filtration, as exposed to callers.
#[derive(Debug, Clone, PartialEq)]
pub struct FiltrationSimplex {
    pub vertices: Vec<usize>,
    pub value: f64,
    /// Longest edge; ties go to the lexicographically smallest pair.
    /// `None` for vertices.
    pub critical_edge: Option<Edge>,
}

impl FiltrationSimplex {
    pub fn dim(&self) -> usize {
        self.vertices.len() - 1
    }
}

/// All simplices of one dimension, sorted by (value, lexicographic vertices).
#[derive(Debug, Clone)]
pub(crate) struct Level {
    pub(crate) dim: usize,
    vertices: Vec<u32>,
    pub(crate) values: Vec<f64>,
    critical: Vec<(u32, u32)>,
    lookup: Lookup,
}

#[derive(Debug, Clone)]
enum Lookup {
    Dense(Vec<u32>),
    Sparse(HashMap<u64, u32>),
}

impl Lookup {
    fn get(&self, rank: u64) -> Option<u32> {
        match self {
            Lookup::Dense(table) => table.get(rank as usize).copied().filter(|&p| p != ABSENT),
            Lookup::Sparse(map) => map.get(&rank).copied(),
        }
    }
}

impl Level {
    pub(crate) fn len(&self) -> usize {
        self.values.len()
    }

    pub(crate) fn vertices(&self, pos: usize) -> &[u32] {
        let w = self.dim + 1;
        &self.vertices[pos * w..(pos + 1) * w]
    }

    pub(crate) fn critical_edge(&self, pos: usize) -> Option<Edge> {
        (self.dim > 0).then(|| {
            let (p, q) = self.critical[pos];
            (p as usize, q as usize)
        })
    }

    pub(crate) fn position(&self, rank: u64) -> Option<u32> {
        self.lookup.get(rank)
    }
}

/// Binomial coefficients `C(v, j)` for `v <= n`, `j <= k`.
#[derive(Debug, Clone)]
pub(crate) struct Binomials {
    k: usize,
    table: Vec<u64>,
}

impl Binomials {
    fn new(n: usize, k: usize) -> Result<Self> {
        let mut table = vec![0u64; (n + 1) * (k + 1)];
        for v in 0..=n {
            table[v * (k + 1)] = 1;
            for j in 1..=k.min(v) {
                let a = if j <= v - 1 { table[(v - 1) * (k + 1) + j] } else { 0 };
                let b = table[(v - 1) * (k + 1) + j - 1];
                table[v * (k + 1) + j] = a.checked_add(b).ok_or_else(|| {
                    Error::invalid(format!("C({n}, {k}) overflows simplex ranks"))
                })?;
            }
        }
        Ok(Binomials { k, table })
    }

    #[inline]
    pub(crate) fn get(&self, v: usize, j: usize) -> u64 {
        if j > v {
            0
        } else {
            self.table[v * (self.k + 1) + j]
        }
    }
}

/// A Vietoris-Rips filtration truncated at dimension `maxdim + 1`.
#[derive(Debug, Clone)]
pub struct Filtration {
    n: usize,
    maxdim: usize,
    threshold: f64,
    pub(crate) levels: Vec<Level>,
    pub(crate) binomials: Binomials,
}

impl Filtration {
    pub fn num_points(&self) -> usize {
        self.n
    }

    /// Highest homology degree this filtration supports.
    pub fn maxdim(&self) -> usize {
        self.maxdim
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    pub fn num_simplices(&self) -> usize {
        self.levels.iter().map(Level::len).sum()
    }

    pub fn count(&self, dim: usize) -> usize {
        self.levels.get(dim).map_or(0, Level::len)
    }

    pub(crate) fn simplex(&self, dim: usize, pos: usize) -> FiltrationSimplex {
        let level = &self.levels[dim];
        FiltrationSimplex {
            vertices: level.vertices(pos).iter().map(|&v| v as usize).collect(),
            value: level.values[pos],
            critical_edge: level.critical_edge(pos),
        }
    }

    /// Every simplex in filtration order: by value, then dimension, then
    /// lexicographic vertex list. Faces always precede cofaces.
    pub fn simplices(&self) -> Vec<FiltrationSimplex> {
        let mut all: Vec<FiltrationSimplex> = self
            .levels
            .iter()
            .flat_map(|level| (0..level.len()).map(move |pos| (level.dim, pos)))
            .map(|(dim, pos)| self.simplex(dim, pos))
            .collect();
        // Within a level the order is already (value, lex); a stable sort on
        // (value, dim) merges the levels.
        all.sort_by(|a, b| a.value.total_cmp(&b.value).then(a.dim().cmp(&b.dim())));
        all
    }

    /// Colex rank of a sorted vertex list.
    #[cfg(test)]
    pub(crate) fn rank(&self, vertices: &[u32]) -> u64 {
        vertices
            .iter()
            .enumerate()
            .map(|(t, &v)| self.binomials.get(v as usize, t + 1))
            .sum()
    }
}

#[inline]
fn beats(len: f64, edge: (u32, u32), best_len: f64, best: (u32, u32)) -> bool {
    len > best_len || (len == best_len && edge < best)
}

/// Builds the Rips filtration of `cloud` with simplices up to dimension
/// `maxdim + 1` and value at most `threshold`.
pub fn build_rips(cloud: &PointCloud, options: RipsOptions) -> Result<Filtration> {
    let n = cloud.len();
    let top = options.maxdim + 1;
    if options.threshold.is_nan() || options.threshold < 0.0 {
        return Err(Error::invalid("Rips threshold must be a nonnegative real or infinity"));
    }
    if n >= u32::MAX as usize {
        return Err(Error::invalid("too many points for a Rips filtration"));
    }
    if options.threshold == f64::INFINITY {
        let total: u128 = (1..=top + 1).map(|j| binomial_u128(n as u128, j as u128)).sum();
        if total > options.simplex_cap as u128 {
            return Err(Error::SimplexBudget {
                requested: total,
                cap: options.simplex_cap,
            });
        }
    }
    let binomials = Binomials::new(n, top + 1)?;

    let mut dist = vec![0.0f64; n * n];
    for i in 0..n {
        for j in i + 1..n {
            let d = cloud.distance(i, j);
            dist[i * n + j] = d;
            dist[j * n + i] = d;
        }
    }
    let within = |i: usize, j: usize| dist[i * n + j] <= options.threshold;

    let mut total = n;
    let cap_error = |requested: usize| Error::SimplexBudget {
        requested: requested as u128,
        cap: options.simplex_cap,
    };
    if total > options.simplex_cap {
        return Err(cap_error(total));
    }

    // Generation happens in lexicographic order; each level is then stably
    // sorted by value.
    let mut levels = Vec::with_capacity(top + 1);
    let mut lex_vertices: Vec<u32> = (0..n as u32).collect();
    let mut lex_values = vec![0.0f64; n];
    let mut lex_critical = vec![(0u32, 0u32); n];
    levels.push(finish_level(0, &lex_vertices, &lex_values, &lex_critical, &binomials, n));

    for dim in 1..=top {
        let w_prev = dim;
        let mut vertices = Vec::new();
        let mut values = Vec::new();
        let mut critical = Vec::new();
        for (s, simplex) in lex_vertices.chunks_exact(w_prev).enumerate() {
            let last = *simplex.last().unwrap() as usize;
            'candidate: for v in last + 1..n {
                let mut best_len = lex_values[s];
                let mut best = lex_critical[s];
                for &u in simplex {
                    let u = u as usize;
                    if !within(u, v) {
                        continue 'candidate;
                    }
                    let len = dist[u * n + v];
                    let edge = (u as u32, v as u32);
                    if dim == 1 || beats(len, edge, best_len, best) {
                        best_len = len;
                        best = edge;
                    }
                }
                total += 1;
                if total > options.simplex_cap {
                    return Err(cap_error(total));
                }
                vertices.extend_from_slice(simplex);
                vertices.push(v as u32);
                values.push(best_len);
                critical.push(best);
            }
        }
        levels.push(finish_level(dim, &vertices, &values, &critical, &binomials, n));
        lex_vertices = vertices;
        lex_values = values;
        lex_critical = critical;
    }

    Ok(Filtration {
        n,
        maxdim: options.maxdim,
        threshold: options.threshold,
        levels,
        binomials,
    })
}

fn finish_level(
    dim: usize,
    lex_vertices: &[u32],
    lex_values: &[f64],
    lex_critical: &[(u32, u32)],
    binomials: &Binomials,
    n: usize,
) -> Level {
    let w = dim + 1;
    let count = lex_values.len();
    // Values are nonnegative, so their bit patterns sort like the values;
    // the generation index breaks ties lexicographically.
    let mut keyed: Vec<(u64, u32)> = lex_values
        .iter()
        .enumerate()
        .map(|(i, v)| (v.to_bits(), i as u32))
        .collect();
    keyed.sort_unstable();
    let order: Vec<u32> = keyed.into_iter().map(|(_, i)| i).collect();

    let mut vertices = Vec::with_capacity(lex_vertices.len());
    let mut values = Vec::with_capacity(count);
    let mut critical = Vec::with_capacity(count);
    for &o in &order {
        let o = o as usize;
        vertices.extend_from_slice(&lex_vertices[o * w..(o + 1) * w]);
        values.push(lex_values[o]);
        critical.push(lex_critical[o]);
    }

    let rank = |simplex: &[u32]| -> u64 {
        simplex
            .iter()
            .enumerate()
            .map(|(t, &v)| binomials.get(v as usize, t + 1))
            .sum()
    };
    let possible = binomials.get(n, w);
    let lookup = if possible <= DENSE_LOOKUP_LIMIT {
        let mut table = vec![ABSENT; possible as usize];
        for (pos, simplex) in vertices.chunks_exact(w).enumerate() {
            table[rank(simplex) as usize] = pos as u32;
        }
        Lookup::Dense(table)
    } else {
        Lookup::Sparse(
            vertices
                .chunks_exact(w)
                .enumerate()
                .map(|(pos, simplex)| (rank(simplex), pos as u32))
                .collect(),
        )
    };

    Level {
        dim,
        vertices,
        values,
        critical,
        lookup,
    }
}

fn binomial_u128(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul(n - i) / (i + 1);
    }
    acc
}
