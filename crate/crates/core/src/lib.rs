//! Tactile grasp exploration over Gaussian-process implicit surfaces.
//!
//! The crate is `no_std` (with `alloc`) and contains every algorithm of the
//! simulator: GP regression, the implicit-surface shape model, Ferrari-Canny
//! grasp quality with Monte-Carlo probability of force closure, the
//! Bayesian-optimisation exploration loop with its heuristic baseline, and the
//! deterministic mesh world that stands in for a physics simulator. File
//! formats, configuration and the command line live in the `gpisgrasp` crate.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod explorer;
pub mod gp;
pub mod gpis;
pub mod grasp;
pub mod hull;
pub mod isosurface;
pub mod linalg;
pub mod math;
pub mod mesh;
pub mod rng;
pub mod world;

mod error;

pub use error::{Error, Infeasibility, Result};
pub use math::{Mat3, Vec3};
