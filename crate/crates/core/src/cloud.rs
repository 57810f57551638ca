//! Point clouds and their CSV interchange format.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};

/// An ordered set of `n` points in `R^d`, stored row-major.
///
/// Point `i` keeps its index for the whole lifetime of an optimization run.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    dim: usize,
    coords: Vec<f64>,
}

impl PointCloud {
    /// Builds a cloud from a flat row-major coordinate buffer.
    pub fn from_flat(dim: usize, coords: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("ambient dimension must be at least 1"));
        }
        if coords.is_empty() {
            return Err(Error::EmptyCloud);
        }
        if coords.len() % dim != 0 {
            return Err(Error::invalid(format!(
                "{} coordinates do not split into points of dimension {dim}",
                coords.len()
            )));
        }
        if let Some(pos) = coords.iter().position(|c| !c.is_finite()) {
            return Err(Error::NonFinite {
                point: pos / dim,
                axis: pos % dim,
            });
        }
        Ok(PointCloud { dim, coords })
    }

    pub fn from_points<P: AsRef<[f64]>>(points: &[P]) -> Result<Self> {
        let first = points.first().ok_or(Error::EmptyCloud)?;
        let dim = first.as_ref().len();
        let mut coords = Vec::with_capacity(points.len() * dim);
        for (i, p) in points.iter().enumerate() {
            let p = p.as_ref();
            if p.len() != dim {
                return Err(Error::invalid(format!(
                    "point {i} has {} coordinates, expected {dim}",
                    p.len()
                )));
            }
            coords.extend_from_slice(p);
        }
        Self::from_flat(dim, coords)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    /// Always false for a constructed cloud; present for API symmetry.
    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.coords.chunks_exact(self.dim)
    }

    pub fn as_flat(&self) -> &[f64] {
        &self.coords
    }

    /// Mutable access for in-place updates. Callers must keep coordinates finite.
    pub(crate) fn as_flat_mut(&mut self) -> &mut [f64] {
        &mut self.coords
    }

    /// The sub-cloud formed by `indices`, in the given order.
    pub fn select(&self, indices: &[usize]) -> PointCloud {
        let mut coords = Vec::with_capacity(indices.len() * self.dim);
        for &i in indices {
            coords.extend_from_slice(self.point(i));
        }
        PointCloud {
            dim: self.dim,
            coords,
        }
    }

    pub fn distance(&self, i: usize, j: usize) -> f64 {
        euclidean(self.point(i), self.point(j))
    }

    /// Largest pairwise distance. O(n^2).
    pub fn diameter(&self) -> f64 {
        let n = self.len();
        let mut best = 0.0f64;
        for i in 0..n {
            for j in i + 1..n {
                best = best.max(self.distance(i, j));
            }
        }
        best
    }

    pub fn all_finite(&self) -> bool {
        self.coords.iter().all(|c| c.is_finite())
    }
}

#[inline]
pub fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    squared_distance(a, b).sqrt()
}

#[inline]
pub fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Reads a header-less CSV file with one point per row.
pub fn load_points(path: impl AsRef<Path>) -> Result<PointCloud> {
    let path = path.as_ref();
    let csv_err = |source| Error::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(csv_err)?;

    let mut dim = None;
    let mut coords = Vec::new();
    for (row, record) in reader.records().enumerate() {
        let record = record.map_err(csv_err)?;
        if record.len() == 1 && record[0].is_empty() {
            continue;
        }
        let expected = *dim.get_or_insert(record.len());
        if record.len() != expected {
            return Err(Error::RaggedRow {
                path: path.to_path_buf(),
                row: row + 1,
                expected,
                found: record.len(),
            });
        }
        for (column, field) in record.iter().enumerate() {
            let value: f64 = field.parse().map_err(|_| Error::NonNumeric {
                path: path.to_path_buf(),
                row: row + 1,
                column: column + 1,
                field: field.to_string(),
            })?;
            coords.push(value);
        }
    }
    match dim {
        Some(dim) => PointCloud::from_flat(dim, coords),
        None => Err(Error::EmptyFile(path.to_path_buf())),
    }
}

/// Writes one point per row. Values use Rust's shortest round-trip
/// formatting, so loading the file reproduces every coordinate exactly.
pub fn save_points(cloud: &PointCloud, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let io_err = |source| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    let mut out = BufWriter::new(File::create(path).map_err(io_err)?);
    write_points(cloud, &mut out).map_err(io_err)?;
    out.flush().map_err(io_err)
}

pub fn write_points<W: Write>(cloud: &PointCloud, out: &mut W) -> std::io::Result<()> {
    for p in cloud.points() {
        let mut first = true;
        for c in p {
            if !first {
                out.write_all(b",")?;
            }
            first = false;
            write!(out, "{c:?}")?;
        }
        out.write_all(b"\n")?;
    }
    Ok(())
}
