//! Least-squares VAR without intercept.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::numerics::{Cholesky, Mat};

/// `z_t = Σ_j Φ_j z_{t−j} + e_t`, fitted on rows `start..T`.
#[derive(Clone, Debug, PartialEq)]
pub struct VarFit {
    pub phi: Vec<Mat>,
    /// `(T − start) × m`.
    pub residuals: Mat,
    /// Residual covariance with divisor `T − start`.
    pub sigma: Mat,
}

pub fn fit_var(z: &Mat, p: usize, start: usize) -> Result<VarFit> {
    let (t, m) = (z.rows(), z.cols());
    assert!(p >= 1 && start >= p, "fit_var needs 1 <= p <= start");
    let d = p * m;
    if t <= start + d {
        return Err(Error::InsufficientSample { needed: start + d, got: t });
    }
    let mut xtx = Mat::zeros(d, d);
    let mut xty = Mat::zeros(d, m);
    let mut w = alloc::vec![0.0; d];
    for s in start..t {
        for j in 0..p {
            w[j * m..(j + 1) * m].copy_from_slice(z.row(s - 1 - j));
        }
        let zs = z.row(s);
        for a in 0..d {
            let wa = w[a];
            if wa == 0.0 {
                continue;
            }
            let row = xtx.row_mut(a);
            for b in 0..=a {
                row[b] += wa * w[b];
            }
            let row = xty.row_mut(a);
            for (c, zc) in zs.iter().enumerate() {
                row[c] += wa * zc;
            }
        }
    }
    for a in 0..d {
        for b in 0..a {
            xtx[(b, a)] = xtx[(a, b)];
        }
    }
    let ch = Cholesky::new(&xtx).map_err(|_| Error::SingularDesign { context: "VAR regression" })?;
    let coef = ch.solve(&xty); // d × m, column c is equation c
    let phi: Vec<Mat> = (0..p).map(|j| coef.block(j * m, 0, m, m).transpose()).collect();
    let t_eff = t - start;
    let mut residuals = Mat::zeros(t_eff, m);
    for s in start..t {
        let e = residuals.row_mut(s - start);
        e.copy_from_slice(z.row(s));
        for (j, ph) in phi.iter().enumerate() {
            let prev = z.row(s - 1 - j);
            for (i, ei) in e.iter_mut().enumerate() {
                *ei -= crate::numerics::dot(ph.row(i), prev);
            }
        }
    }
    let sigma = residuals.t_matmul(&residuals).scale(1.0 / t_eff as f64).symmetrize();
    Ok(VarFit { phi, residuals, sigma })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{std_normal, RngStream};

    #[test]
    fn recovers_ar1() {
        let mut rng = RngStream::new(2, 0).rng();
        let t = 20_000;
        let mut z = Mat::zeros(t, 2);
        for s in 1..t {
            z[(s, 0)] = 0.5 * z[(s - 1, 0)] + 0.2 * z[(s - 1, 1)] + std_normal(&mut rng);
            z[(s, 1)] = -0.3 * z[(s - 1, 1)] + std_normal(&mut rng);
        }
        let f = fit_var(&z, 1, 1).unwrap();
        let want = Mat::from_rows(&[&[0.5, 0.2], &[0.0, -0.3]]);
        assert!(f.phi[0].sub(&want).norm_max() < 0.03);
        assert!(f.sigma.sub(&Mat::identity(2)).norm_max() < 0.05);
    }

    #[test]
    fn exact_recursion_has_zero_residuals() {
        let mut z = Mat::zeros(30, 1);
        z[(0, 0)] = 1.0;
        z[(1, 0)] = 0.5;
        for s in 2..30 {
            z[(s, 0)] = 0.6 * z[(s - 1, 0)] - 0.2 * z[(s - 2, 0)];
        }
        let f = fit_var(&z, 2, 2).unwrap();
        assert!((f.phi[0][(0, 0)] - 0.6).abs() < 1e-10);
        assert!((f.phi[1][(0, 0)] + 0.2).abs() < 1e-10);
        assert!(f.residuals.norm_max() < 1e-10);
    }
}
