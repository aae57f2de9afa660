//! Simulation and analytic toolkit for Liouville first passage percolation (LFPP).
//!
//! The crate is split along the lines of the computation:
//!
//! * [`analytic`] evaluates closed-form exponent bounds and predictions.
//! * [`field`] samples log-correlated Gaussian fields on dyadic grids.
//! * [`engine`] computes LFPP lengths, crossing distances and geodesics.
//! * [`scaling`] turns per-scale Monte-Carlo output into exponent estimates.

pub mod analytic;
pub mod engine;
pub mod error;
pub mod field;
pub mod rng;
pub mod scaling;
mod summation;

pub use error::{Error, Result};
