//! Feasible GLS on a quasi-differenced system.
//!
//! Every estimator in the crate is GLS on
//! `ỹ_t = y_t − Σ_j Ψ_j y_{t−j} − Σ_j Ψux,j (x_{t−j} − μ)` against
//! `Z̃_tᵀ = [A, Σ_{j=0..p} C_j ⊗ x_{t−j}ᵀ]` with `C_0 = I`, `C_j = −Ψ_j` and
//! `A = Σ_j C_j`. Because the regressors are common across equations the
//! normal equations are assembled from `r×r` lagged moments of `x` instead of
//! materializing `Z̃_t`.

use alloc::vec;
use alloc::vec::Vec;

use super::{FitResult, Method};
use crate::dgp::Panel;
use crate::error::{Error, Result};
use crate::numerics::{Cholesky, Mat};

/// Nuisance estimates that define the transformation and the weight.
#[derive(Clone, Debug, PartialEq)]
pub struct Filter {
    /// Autoregressive filter, `p` matrices `N×N`.
    pub psi: Vec<Mat>,
    /// Feedback from lagged regressors, empty or `p` matrices `N×r`.
    pub psi_ux: Vec<Mat>,
    pub mu_x: Vec<f64>,
    /// Weight `Σ̂` (the GLS metric is its inverse).
    pub sigma: Mat,
}

impl Filter {
    /// No filtering and identity weight: GLS collapses to OLS.
    pub fn identity(n: usize, r: usize) -> Self {
        Self { psi: Vec::new(), psi_ux: Vec::new(), mu_x: vec![0.0; r], sigma: Mat::identity(n) }
    }

    pub fn p(&self) -> usize {
        self.psi.len()
    }
}

/// Raw GLS output before it is dressed as a [`FitResult`].
pub(crate) struct GlsSolution {
    pub kappa: Vec<f64>,
    /// `H⁻¹` where `H = Σ_t Z̃_t Σ̂⁻¹ Z̃_tᵀ`.
    pub h_inv: Mat,
    /// Transformed-equation residuals, `T_eff × N`.
    pub residuals: Mat,
}

pub(crate) fn solve_filtered(panel: &Panel, f: &Filter, start: usize) -> Result<GlsSolution> {
    let (t, n, r) = (panel.t(), panel.n(), panel.r());
    let p = f.p();
    assert!(start >= p, "sample must start at or after row p");
    if !f.psi_ux.is_empty() && f.psi_ux.len() != p {
        return Err(Error::DimensionMismatch("psi_ux must be empty or match psi".into()));
    }
    let k = n * (1 + r);
    if t <= start {
        return Err(Error::EmptySample);
    }
    let t_eff = t - start;
    let s_inv = Cholesky::new(&f.sigma)?.inverse();

    let mut c = Vec::with_capacity(p + 1);
    c.push(Mat::identity(n));
    for ps in &f.psi {
        c.push(ps.scale(-1.0));
    }
    let mut a = Mat::zeros(n, n);
    for cj in &c {
        a.add_assign(cj);
    }

    // transformed dependent variable
    let mut yt = Mat::zeros(t_eff, n);
    let mut xc = vec![0.0; r];
    for s in start..t {
        let row = yt.row_mut(s - start);
        row.copy_from_slice(panel.y.row(s));
        for (j, ps) in f.psi.iter().enumerate() {
            let prev = panel.y.row(s - 1 - j);
            for (i, v) in row.iter_mut().enumerate() {
                *v -= crate::numerics::dot(ps.row(i), prev);
            }
        }
        for (j, pux) in f.psi_ux.iter().enumerate() {
            for (q, v) in xc.iter_mut().enumerate() {
                *v = panel.x[(s - 1 - j, q)] - f.mu_x[q];
            }
            for (i, v) in row.iter_mut().enumerate() {
                *v -= crate::numerics::dot(pux.row(i), &xc);
            }
        }
    }

    // moments: sums of lagged x, their cross products, and ỹ x_{t−j}ᵀ
    let mut sx = vec![vec![0.0; r]; p + 1];
    let mut mxx = vec![Mat::zeros(r, r); (p + 1) * (p + 1)];
    let mut gy = vec![Mat::zeros(n, r); p + 1];
    let mut ysum = vec![0.0; n];
    for s in start..t {
        let ys = yt.row(s - start);
        for (i, v) in ys.iter().enumerate() {
            ysum[i] += v;
        }
        for j in 0..=p {
            let xj = panel.x.row(s - j);
            for (q, v) in xj.iter().enumerate() {
                sx[j][q] += v;
            }
            for jj in 0..=j {
                let xjj = panel.x.row(s - jj);
                let m = &mut mxx[j * (p + 1) + jj];
                for q in 0..r {
                    let row = m.row_mut(q);
                    for (qq, w) in xjj.iter().enumerate() {
                        row[qq] += xj[q] * w;
                    }
                }
            }
            let g = &mut gy[j];
            for i in 0..n {
                let row = g.row_mut(i);
                for (q, w) in xj.iter().enumerate() {
                    row[q] += ys[i] * w;
                }
            }
        }
    }
    for j in 0..=p {
        for jj in 0..j {
            mxx[jj * (p + 1) + j] = mxx[j * (p + 1) + jj].transpose();
        }
    }

    let sc: Vec<Mat> = c.iter().map(|cj| s_inv.matmul(cj)).collect();
    let ats = a.t_matmul(&s_inv);
    let mut h = Mat::zeros(k, k);
    h.set_block(0, 0, &ats.matmul(&a).scale(t_eff as f64));
    for (j, scj) in sc.iter().enumerate() {
        let asc = a.t_matmul(scj);
        for ai in 0..n {
            for l in 0..n {
                let v = asc[(ai, l)];
                for q in 0..r {
                    h[(ai, n + l * r + q)] += v * sx[j][q];
                }
            }
        }
    }
    for (j, cj) in c.iter().enumerate() {
        for (jj, scjj) in sc.iter().enumerate() {
            let w = cj.t_matmul(scjj);
            let m = &mxx[j * (p + 1) + jj];
            for l in 0..n {
                for ll in 0..n {
                    let v = w[(l, ll)];
                    if v == 0.0 {
                        continue;
                    }
                    for q in 0..r {
                        let base = (n + l * r + q) * k + n + ll * r;
                        let hrow = &mut h.as_mut_slice()[base..base + r];
                        for (qq, hv) in hrow.iter_mut().enumerate() {
                            *hv += v * m[(q, qq)];
                        }
                    }
                }
            }
        }
    }
    for i in 0..n {
        for j in n..k {
            h[(j, i)] = h[(i, j)];
        }
    }

    let mut rhs = vec![0.0; k];
    rhs[..n].copy_from_slice(&ats.matvec(&ysum));
    for (j, cj) in c.iter().enumerate() {
        let cs = cj.t_matmul(&s_inv).matmul(&gy[j]);
        for l in 0..n {
            for q in 0..r {
                rhs[n + l * r + q] += cs[(l, q)];
            }
        }
    }

    let hc = Cholesky::new(&h).map_err(|_| Error::SingularDesign { context: "GLS normal equations" })?;
    let kappa = hc.solve_vec(&rhs);
    let h_inv = hc.inverse();

    let alpha = &kappa[..n];
    let b = Mat::from_vec(n, r, kappa[n..].to_vec())?;
    let a_alpha = a.matvec(alpha);
    let cb: Vec<Mat> = c.iter().map(|cj| cj.matmul(&b)).collect();
    let mut residuals = yt;
    for s in start..t {
        let row = residuals.row_mut(s - start);
        for (i, v) in row.iter_mut().enumerate() {
            *v -= a_alpha[i];
        }
        for (j, cbj) in cb.iter().enumerate() {
            let xj = panel.x.row(s - j);
            for (i, v) in row.iter_mut().enumerate() {
                *v -= crate::numerics::dot(cbj.row(i), xj);
            }
        }
    }
    Ok(GlsSolution { kappa, h_inv, residuals })
}

/// GLS on the system transformed by `filter`, sample rows `start..T`. The
/// result carries `V̂ = T_eff·H⁻¹` and `filter.sigma` as `Σ̂uu`.
pub fn filtered_gls(panel: &Panel, filter: &Filter, start: usize, method: Method) -> Result<FitResult> {
    let sol = solve_filtered(panel, filter, start)?;
    let t_eff = panel.t() - start;
    Ok(FitResult {
        method,
        kappa_hat: sol.kappa,
        v_hat: Some(sol.h_inv.scale(t_eff as f64)),
        sigma_uu_hat: filter.sigma.clone(),
        p_used: filter.p(),
        t_eff,
        residuals: sol.residuals,
        n: panel.n(),
        r: panel.r(),
        stage: None,
    })
}
