use alloc::string::String;

/// Failure modes shared by every estimator, test and simulator in the crate.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("matrix is not positive definite (pivot {pivot} at index {index})")]
    NotPositiveDefinite { index: usize, pivot: f64 },
    #[error("matrix is not symmetric within tolerance (max asymmetry {asymmetry})")]
    NotSymmetric { asymmetry: f64 },
    #[error("singular design in {context}")]
    SingularDesign { context: &'static str },
    #[error("singular restriction: R V R' is not positive definite")]
    SingularRestriction,
    #[error("eigenvalue iteration did not converge after {sweeps} sweeps")]
    NoConvergence { sweeps: usize },
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("non-finite value in input")]
    NonFinite,
    #[error("empty sample")]
    EmptySample,
    #[error("cross rank {rank} exceeds min(r, N) = {max}")]
    InvalidRank { rank: usize, max: usize },
    #[error("target spectral radius {0} outside (0, 1)")]
    InvalidTarget(f64),
    #[error("VAR specification is not stable (spectral radius {0})")]
    UnstableSpec(f64),
    #[error("insufficient sample: need T > {needed}, got {got}")]
    InsufficientSample { needed: usize, got: usize },
    #[error("bootstrap degenerate: {failed} of {attempted} resamples failed")]
    BootstrapDegenerate { failed: usize, attempted: usize },
}

pub type Result<T> = core::result::Result<T, Error>;
