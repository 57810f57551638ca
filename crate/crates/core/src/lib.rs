//! Persistence-based optimization of point clouds.
//!
//! The pipeline per iteration: pick a subsample ([`subsample`]), compute its
//! Vietoris-Rips persistence and the sparse chain-rule gradient of a diagram
//! loss ([`persistence`], [`losses`]), extend that gradient to an ambient
//! vector field ([`smoothing`]), and move every point along it
//! ([`optimizer`]). The NW bandwidth can be adapted online ([`bandwidth`]).

pub mod bandwidth;
pub mod cloud;
pub mod dataset;
pub mod error;
pub mod losses;
pub mod optimizer;
pub mod persistence;
pub mod rng;
pub mod smoothing;
pub mod subsample;

pub use cloud::{load_points, save_points, PointCloud};
pub use error::{Error, Result};
pub use rng::RngSeed;
