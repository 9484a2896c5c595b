//! Standard-library companion of `gdsur-core`: CSV panels, the fixed-b table
//! cache, the Monte Carlo harness, JSON reports and the `gdsur` command line.

pub mod config;
pub mod empirical;
pub mod error;
pub mod fdb;
pub mod fixedb;
pub mod io;
pub mod montecarlo;
pub mod report;

pub use error::{AppError, AppResult, DataError};
