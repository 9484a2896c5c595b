//! Generalized-Durbin estimation and specification tests for multivariate
//! time-series regressions with common regressors.
//!
//! The crate is `no_std` (it needs `alloc`). Parallel Monte Carlo, file
//! formats and the command line live in the `gdsur` crate.
#![no_std]
#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod bootstrap;
pub mod dgp;
pub mod error;
pub mod estimators;
pub mod inference;
pub mod numerics;

pub use error::{Error, Result};
pub use numerics::{Mat, RngStream};
