//! Dense linear algebra, random streams and reference distributions.

pub mod dist;
pub mod eigen;
pub mod linalg;
pub mod mat;
pub mod rng;
pub mod stats;

pub use dist::{chi2_sf, dist_sf, Dist};
pub use eigen::{eigenvalues, spectral_radius, symmetric_eigenvalues};
pub use linalg::{
    cholesky, householder_qr, inverse_spd, qr, random_orthogonal, random_orthogonal_with, solve_general, solve_spd, Cholesky, Lu, QrSign,
};
pub use mat::{dot, Mat};
pub use rng::{std_normal, RngStream};
pub use stats::{empirical_quantile, ks_distance, quantile_sorted};
