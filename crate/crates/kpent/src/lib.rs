//! Numerical checks for entropic monotonicity under contractions.
//!
//! The library computes Rényi entropies of densities on regular grids,
//! symmetric decreasing rearrangements and the majorization order, volumes
//! of unions/intersections of congruent balls, entropy-power inequalities
//! with Gaussian noise, and order-2 diversity functionals. Every named
//! inequality is packaged as a seedable, tolerance-aware check in
//! [`harness`], plus randomized falsification stress-tests for the open
//! conjectures.
//!
//! Start with the runnable examples (`cargo run --release --example
//! entropy_basics`, etc.); the thin `kpent` binary exposes the same
//! machinery as subcommands.




pub mod ballgeom;
pub mod budget;
pub mod contract;
pub mod convolve;
pub mod diversity;

pub mod error;
pub mod gauss_epi;

pub mod grid;
pub mod harness;

pub mod linalg;
pub mod polygon;

pub mod rearrange;
pub mod report;

pub mod rng;

pub use error::{Error, Result};
pub use grid::{DensityGrid, GridSpec};
