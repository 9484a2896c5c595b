//! Equation-by-equation Durbin regressions.

use alloc::vec::Vec;

use crate::dgp::Panel;
use crate::error::{Error, Result};
use crate::numerics::{Cholesky, Mat};

/// First-stage output: per-equation Durbin coefficients and the nuisance
/// quantities assembled from them.
#[derive(Clone, Debug, PartialEq)]
pub struct DurbinStage {
    pub p: usize,
    /// `N × d`, row `i` is `θ̂_iᵀ = [γ_i, β_iᵀ, ψ_{1,i}ᵀ..ψ_{p,i}ᵀ, λ_{1,i}ᵀ..λ_{p,i}ᵀ]`.
    pub theta: Mat,
    pub gamma: Vec<f64>,
    /// `N × r`, row `i` is `β̂_iᵀ`.
    pub b_hat: Mat,
    pub psi_uu: Vec<Mat>,
    pub lambda: Vec<Mat>,
    /// `Λ̂_j + Ψ̂uu,j B̂`.
    pub psi_ux: Vec<Mat>,
    pub mu_x: Vec<f64>,
    pub sigma_uu: Mat,
    /// `T_eff × N`.
    pub residuals: Mat,
    /// First sample row (0-based); `T_eff = T − start`.
    pub start: usize,
}

impl DurbinStage {
    pub fn t_eff(&self) -> usize {
        self.residuals.rows()
    }
}

/// Regressor count of each Durbin equation.
pub fn durbin_width(n: usize, r: usize, p: usize) -> usize {
    1 + r + p * n + p * r
}

/// Durbin regressions on rows `p..T`.
pub fn durbin_stage(panel: &Panel, p: usize) -> Result<DurbinStage> {
    durbin_stage_on(panel, p, p)
}

/// Durbin regressions on rows `start..T` (`start ≥ p`).
pub fn durbin_stage_on(panel: &Panel, p: usize, start: usize) -> Result<DurbinStage> {
    if p == 0 {
        return Err(Error::InvalidParams("lag order must be at least 1".into()));
    }
    assert!(start >= p, "sample must start at or after row p");
    let (t, n, r) = (panel.t(), panel.n(), panel.r());
    let d = durbin_width(n, r, p);
    if t <= start + d {
        return Err(Error::InsufficientSample { needed: start + d, got: t });
    }
    let mut wtw = Mat::zeros(d, d);
    let mut wty = Mat::zeros(d, n);
    let mut w = alloc::vec![0.0; d];
    let fill = |s: usize, w: &mut [f64]| {
        w[0] = 1.0;
        w[1..1 + r].copy_from_slice(panel.x.row(s));
        let mut o = 1 + r;
        for j in 1..=p {
            w[o..o + n].copy_from_slice(panel.y.row(s - j));
            o += n;
        }
        for j in 1..=p {
            w[o..o + r].copy_from_slice(panel.x.row(s - j));
            o += r;
        }
    };
    for s in start..t {
        fill(s, &mut w);
        let ys = panel.y.row(s);
        for a in 0..d {
            let wa = w[a];
            let row = wtw.row_mut(a);
            for b in 0..=a {
                row[b] += wa * w[b];
            }
            let row = wty.row_mut(a);
            for (c, yc) in ys.iter().enumerate() {
                row[c] += wa * yc;
            }
        }
    }
    for a in 0..d {
        for b in 0..a {
            wtw[(b, a)] = wtw[(a, b)];
        }
    }
    let ch = Cholesky::new(&wtw).map_err(|_| Error::SingularDesign { context: "Durbin regression" })?;
    let theta = ch.solve(&wty).transpose();

    let t_eff = t - start;
    let mut residuals = Mat::zeros(t_eff, n);
    for s in start..t {
        fill(s, &mut w);
        let e = residuals.row_mut(s - start);
        for i in 0..n {
            e[i] = panel.y[(s, i)] - crate::numerics::dot(theta.row(i), &w);
        }
    }
    let sigma_uu = residuals.t_matmul(&residuals).scale(1.0 / t_eff as f64).symmetrize();

    let gamma = theta.col_vec(0);
    let b_hat = theta.block(0, 1, n, r);
    let psi_uu: Vec<Mat> = (0..p).map(|j| theta.block(0, 1 + r + j * n, n, n)).collect();
    let lambda: Vec<Mat> = (0..p).map(|j| theta.block(0, 1 + r + p * n + j * r, n, r)).collect();
    let psi_ux = lambda.iter().zip(&psi_uu).map(|(l, u)| l.add(&u.matmul(&b_hat))).collect();
    let mu_x = panel.x.slice_rows(start, t).column_means();
    Ok(DurbinStage { p, theta, gamma, b_hat, psi_uu, lambda, psi_ux, mu_x, sigma_uu, residuals, start })
}
