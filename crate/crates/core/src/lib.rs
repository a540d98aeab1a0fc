//! Detection of circles and circular arcs in binary raster images.
//!
//! The pipeline thins the input, traces it into digital curves, drops
//! straight pieces, certifies circular runs with a chord-angle test,
//! merges neighbouring arcs, estimates centre and radius from the sagitta
//! and refines them with a Hough vote confined to a small parameter box.

pub mod baselines;
pub mod cli;
pub mod csa;
pub mod curves;
pub mod digigeom;
pub mod eval;
pub mod error;
pub mod raster;

pub use error::{Error, Result};
