//! Command-line harness for LFPP experiments: bound tables, simulations,
//! exponent fits and SVG figures.

pub mod cli;
pub mod config;
pub mod estimate;
pub mod format;
pub mod simulate;
pub mod svg;
pub mod tables;
