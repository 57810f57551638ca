//! Anchor configurations for side-by-side kernel/NW field comparisons, and
//! the grid dump that samples both fields.

use std::f64::consts::TAU;
use std::io::Write;

use rand::Rng;

use crate::error::{Error, Result};
use crate::rng::{RngSeed, Stream};

use super::{kernel_solve, SmoothField};

pub const PRESET_NAMES: [&str; 4] = ["ring-conflict", "dipole", "saddle-ring", "random-sparse"];

/// Axis-aligned sampling window `[x_min, x_max] x [y_min, y_max]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridWindow {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl GridWindow {
    pub fn square(half_width: f64) -> Self {
        GridWindow {
            x_min: -half_width,
            x_max: half_width,
            y_min: -half_width,
            y_max: half_width,
        }
    }

    pub fn corners(&self) -> [[f64; 2]; 4] {
        [
            [self.x_min, self.y_min],
            [self.x_max, self.y_min],
            [self.x_min, self.y_max],
            [self.x_max, self.y_max],
        ]
    }
}

/// Planar anchors, their vectors, and the bandwidth used to smooth them.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldPreset {
    pub name: String,
    pub anchors: Vec<[f64; 2]>,
    pub gradients: Vec<[f64; 2]>,
    pub sigma: f64,
    pub window: GridWindow,
}

const PRESET_SIGMA: f64 = 0.35;

impl FieldPreset {
    pub fn by_name(name: &str, seed: RngSeed) -> Result<Self> {
        let preset = match name {
            "ring-conflict" => ring_conflict(),
            "dipole" => dipole(),
            "saddle-ring" => saddle_ring(),
            "random-sparse" => random_sparse(seed),
            other => {
                return Err(Error::invalid(format!(
                    "unknown field preset {other:?} (expected one of {})",
                    PRESET_NAMES.join(", ")
                )))
            }
        };
        Ok(preset)
    }

    /// A single anchor; used to check the closed forms of both fields.
    pub fn single(anchor: [f64; 2], gradient: [f64; 2], sigma: f64) -> Self {
        FieldPreset {
            name: "single".into(),
            anchors: vec![anchor],
            gradients: vec![gradient],
            sigma,
            window: GridWindow::square(2.0),
        }
    }

    pub fn nw_field(&self) -> Result<SmoothField> {
        SmoothField::nw(2, self.anchors.concat(), self.gradients.concat(), self.sigma)
    }

    pub fn kernel_field(&self, jitter: Option<f64>) -> Result<SmoothField> {
        kernel_solve(2, self.anchors.concat(), self.gradients.concat(), self.sigma, jitter)
    }

    pub fn max_gradient_norm(&self) -> f64 {
        self.gradients.iter().map(|g| g[0].hypot(g[1])).fold(0.0, f64::max)
    }
}

fn ring(count: usize, radius: f64) -> impl Iterator<Item = (f64, [f64; 2])> {
    (0..count).map(move |k| {
        let a = TAU * k as f64 / count as f64;
        (a, [radius * a.cos(), radius * a.sin()])
    })
}

/// Tangential swirl on a ring, with two interior anchors pushing apart.
fn ring_conflict() -> FieldPreset {
    let mut anchors = Vec::new();
    let mut gradients = Vec::new();
    for (a, p) in ring(8, 1.0) {
        anchors.push(p);
        gradients.push([-a.sin(), a.cos()]);
    }
    anchors.extend([[-0.2, 0.0], [0.2, 0.0]]);
    gradients.extend([[-1.0, 0.0], [1.0, 0.0]]);
    FieldPreset {
        name: "ring-conflict".into(),
        anchors,
        gradients,
        sigma: PRESET_SIGMA,
        window: GridWindow::square(2.0),
    }
}

/// Two tight anchor clusters carrying opposite vectors.
fn dipole() -> FieldPreset {
    let offsets = [[0.0, 0.0], [0.06, 0.03], [0.02, -0.05]];
    let mut anchors = Vec::new();
    let mut gradients = Vec::new();
    for (center, g) in [([-0.6, 0.0], [0.0, 1.0]), ([0.6, 0.0], [0.0, -1.0])] {
        for o in offsets {
            anchors.push([center[0] + o[0], center[1] + o[1]]);
            gradients.push(g);
        }
    }
    FieldPreset {
        name: "dipole".into(),
        anchors,
        gradients,
        sigma: PRESET_SIGMA,
        window: GridWindow::square(2.5),
    }
}

/// Outward ring plus a saddle at the origin.
fn saddle_ring() -> FieldPreset {
    let mut anchors = Vec::new();
    let mut gradients = Vec::new();
    for (a, p) in ring(8, 1.2) {
        anchors.push(p);
        gradients.push([a.cos(), a.sin()]);
    }
    anchors.extend([[0.3, 0.0], [-0.3, 0.0], [0.0, 0.3], [0.0, -0.3]]);
    gradients.extend([[-1.0, 0.0], [1.0, 0.0], [0.0, 1.0], [0.0, -1.0]]);
    FieldPreset {
        name: "saddle-ring".into(),
        anchors,
        gradients,
        sigma: PRESET_SIGMA,
        window: GridWindow::square(2.0),
    }
}

/// Irregular anchors with random unit vectors.
fn random_sparse(seed: RngSeed) -> FieldPreset {
    let mut rng = seed.stream(Stream::Presets);
    let mut anchors = Vec::new();
    let mut gradients = Vec::new();
    for _ in 0..12 {
        anchors.push([rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)]);
        let a = rng.random::<f64>() * TAU;
        gradients.push([a.cos(), a.sin()]);
    }
    FieldPreset {
        name: "random-sparse".into(),
        anchors,
        gradients,
        sigma: PRESET_SIGMA,
        window: GridWindow::square(2.0),
    }
}

fn axis(min: f64, max: f64, count: usize) -> impl Iterator<Item = f64> {
    (0..count).map(move |i| {
        if count == 1 {
            min
        } else {
            min + (max - min) * i as f64 / (count - 1) as f64
        }
    })
}

/// Samples the NW and kernel fields on a `nx x ny` grid spanning `window`
/// (endpoints included). Rows are `x, y, vx_nw, vy_nw, vx_ker, vy_ker`,
/// with `x` varying fastest.
pub fn grid_dump(
    nw: &SmoothField,
    kernel: &SmoothField,
    window: GridWindow,
    resolution: (usize, usize),
) -> Result<Vec<[f64; 6]>> {
    for field in [nw, kernel] {
        if field.dim() != 2 {
            return Err(Error::Dimension {
                expected: 2,
                found: field.dim(),
            });
        }
    }
    let (nx, ny) = resolution;
    if nx == 0 || ny == 0 {
        return Err(Error::invalid("grid resolution must be at least 1 x 1"));
    }
    let mut queries = Vec::with_capacity(2 * nx * ny);
    for y in axis(window.y_min, window.y_max, ny) {
        for x in axis(window.x_min, window.x_max, nx) {
            queries.extend([x, y]);
        }
    }
    let v_nw = nw.eval(&queries)?;
    let v_ker = kernel.eval(&queries)?;
    Ok((0..nx * ny)
        .map(|r| {
            let s = 2 * r;
            [queries[s], queries[s + 1], v_nw[s], v_nw[s + 1], v_ker[s], v_ker[s + 1]]
        })
        .collect())
}

pub fn write_grid<W: Write>(rows: &[[f64; 6]], out: &mut W) -> std::io::Result<()> {
    writeln!(out, "x,y,vx_nw,vy_nw,vx_ker,vy_ker")?;
    for r in rows {
        writeln!(out, "{:?},{:?},{:?},{:?},{:?},{:?}", r[0], r[1], r[2], r[3], r[4], r[5])?;
    }
    Ok(())
}
