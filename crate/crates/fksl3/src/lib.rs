//! Exact large-color sl3 R-matrix state sums for the two-variable series
//! F_K(x, y, q) of positive braid knots, with independent oracles.

pub mod braid;
pub mod cli;
pub mod conventions;
pub mod oracle;
pub mod qseries;
pub mod rmatrix;
pub mod trace;
pub mod verma;
