//! Heteroskedasticity- and autocorrelation-robust Wald test with the
//! quadratic-spectral kernel and fixed-b critical values.

use alloc::vec::Vec;

use super::{LinearRestriction, Reference, TestMethod, TestOutcome};
use crate::dgp::Panel;
use crate::error::{Error, Result};
use crate::estimators::Filter;
use crate::numerics::{std_normal, symmetric_eigenvalues, Cholesky, Mat, RngStream};

/// Bandwidth as a fraction of the sample, `M = bT`.
pub const DEFAULT_B: f64 = 0.02;
pub const DEFAULT_N_GRID: usize = 1000;
pub const DEFAULT_N_SIMS: usize = 50_000;

/// `k(x) = 25/(12π²x²) [sin(6πx/5)/(6πx/5) − cos(6πx/5)]`, `k(0) = 1`.
pub fn qs_kernel(x: f64) -> f64 {
    if x == 0.0 {
        return 1.0;
    }
    let pi = core::f64::consts::PI;
    let z = 6.0 * pi * x / 5.0;
    if z.abs() < 0.1 {
        // Taylor series of 3(sin z/z − cos z)/z², avoids cancellation
        let z2 = z * z;
        return 1.0 - z2 / 10.0 + z2 * z2 / 280.0 - z2 * z2 * z2 / 15_120.0 + z2 * z2 * z2 * z2 / 1_330_560.0;
    }
    25.0 / (12.0 * pi * pi * x * x) * (z.sin() / z - z.cos())
}

/// `Λ(0) + Σ_{j≥1} k(j/M) (Λ(j) + Λ(j)ᵀ)` with `Λ(j) = T⁻¹ Σ_t v_t v_{t−j}ᵀ`;
/// rows of `v` are time periods.
pub fn qs_long_run_covariance(v: &Mat, bandwidth: f64) -> Mat {
    assert!(bandwidth > 0.0, "bandwidth must be positive");
    let (t, q) = (v.rows(), v.cols());
    let mut omega = Mat::zeros(q, q);
    for j in 0..t {
        let w = qs_kernel(j as f64 / bandwidth);
        if w == 0.0 {
            continue;
        }
        let mut lam = Mat::zeros(q, q);
        for s in j..t {
            let a = v.row(s);
            let b = v.row(s - j);
            for i in 0..q {
                let row = lam.row_mut(i);
                for (k, bk) in b.iter().enumerate() {
                    row[k] += a[i] * bk;
                }
            }
        }
        if j == 0 {
            omega.add_assign(&lam);
        } else {
            omega.add_assign(&lam.add(&lam.transpose()).scale(w));
        }
    }
    omega.scale(1.0 / t as f64).symmetrize()
}

/// HAR Wald statistic and its dimension.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HarStatistic {
    pub statistic: f64,
    pub q: usize,
    pub bandwidth: f64,
}

/// `T d' [R Q⁻¹ Ω̂ Q⁻¹ Rᵀ]⁻¹ d` from OLS scores, with `M = bT`.
pub fn har_statistic(panel: &Panel, restr: &LinearRestriction, b: f64) -> Result<HarStatistic> {
    if !(b > 0.0 && b <= 1.0) {
        return Err(Error::InvalidParams(alloc::format!("bandwidth fraction b = {b} outside (0, 1]")));
    }
    let (t, n, r) = (panel.t(), panel.n(), panel.r());
    let k = n * (1 + r);
    if restr.r_mat.cols() != k {
        return Err(Error::DimensionMismatch(alloc::format!("restriction has {} columns, κ has {k}", restr.r_mat.cols())));
    }
    let sol = crate::estimators::gls::solve_filtered(panel, &Filter::identity(n, r), 0)?;
    // R Q⁻¹ with Q = T⁻¹ Σ Z Zᵀ
    let rq = restr.r_mat.matmul(&sol.h_inv).scale(t as f64);
    let q = restr.q();
    let mut g = Mat::zeros(t, q);
    let mut vt = alloc::vec![0.0; k];
    for s in 0..t {
        let u = sol.residuals.row(s);
        let x = panel.x.row(s);
        vt[..n].copy_from_slice(u);
        for l in 0..n {
            for (c, xc) in x.iter().enumerate() {
                vt[n + l * r + c] = u[l] * xc;
            }
        }
        let gs = g.row_mut(s);
        for (i, gi) in gs.iter_mut().enumerate() {
            *gi = crate::numerics::dot(rq.row(i), &vt);
        }
    }
    let bandwidth = b * t as f64;
    let omega = qs_long_run_covariance(&g, bandwidth);
    let d = restr.discrepancy(&sol.kappa);
    let ch = Cholesky::new(&omega).map_err(|_| Error::SingularRestriction)?;
    let stat = t as f64 * crate::numerics::dot(&d, &ch.solve_vec(&d));
    Ok(HarStatistic { statistic: stat, q, bandwidth })
}

/// Positive eigenvalues of the centred kernel matrix `M K M`, where
/// `K_ts = k((t−s)/(b·n))` on an `n`-point grid and `M = I − 11ᵀ/n`.
pub fn kernel_eigenvalues(b: f64, n_grid: usize) -> Result<Vec<f64>> {
    if !(b > 0.0 && b <= 1.0) || n_grid < 2 {
        return Err(Error::InvalidParams(alloc::format!("fixed-b grid needs b in (0, 1] and n >= 2, got b={b}, n={n_grid}")));
    }
    let n = n_grid;
    let bn = b * n as f64;
    let kv: Vec<f64> = (0..n).map(|d| qs_kernel(d as f64 / bn)).collect();
    // centring a Toeplitz matrix: K̃_ts = K_ts − m_t − m_s + m̄
    let mut rowmean = alloc::vec![0.0; n];
    for (t, m) in rowmean.iter_mut().enumerate() {
        *m = (0..n).map(|s| kv[t.abs_diff(s)]).sum::<f64>() / n as f64;
    }
    let grand = rowmean.iter().sum::<f64>() / n as f64;
    let kt = Mat::from_fn(n, n, |t, s| kv[t.abs_diff(s)] - rowmean[t] - rowmean[s] + grand);
    let ev = symmetric_eigenvalues(&kt)?;
    let top = ev.iter().fold(0.0f64, |a, &b| a.max(b));
    Ok(ev.into_iter().rev().filter(|&l| l > 1e-12 * top).collect())
}

/// Simulated fixed-b null law of the HAR Wald statistic, stored sorted.
#[derive(Clone, Debug, PartialEq)]
pub struct FixedBTable {
    pub b: f64,
    pub q: usize,
    pub n_grid: usize,
    pub seed: u64,
    pub draws: Vec<f64>,
}

impl FixedBTable {
    /// Draws `W = ξ₀ᵀ [n⁻¹ Σ_j λ_j ξ_j ξ_jᵀ]⁻¹ ξ₀` with i.i.d. `N(0, I_q)` vectors,
    /// the exact law of the discretized Brownian-bridge functional.
    pub fn simulate(b: f64, q: usize, n_grid: usize, n_sims: usize, seed: u64) -> Result<Self> {
        let lambda = kernel_eigenvalues(b, n_grid)?;
        Self::from_eigenvalues(&lambda, b, q, n_grid, n_sims, seed)
    }

    pub fn from_eigenvalues(lambda: &[f64], b: f64, q: usize, n_grid: usize, n_sims: usize, seed: u64) -> Result<Self> {
        if q == 0 || n_sims == 0 {
            return Err(Error::InvalidParams("fixed-b table needs q >= 1 and n_sims >= 1".into()));
        }
        let mut rng = RngStream::new(seed, q as u64).rng();
        let inv_n = 1.0 / n_grid as f64;
        let mut draws = Vec::with_capacity(n_sims);
        let mut xi0 = alloc::vec![0.0; q];
        let mut xi = alloc::vec![0.0; q];
        while draws.len() < n_sims {
            for v in xi0.iter_mut() {
                *v = std_normal(&mut rng);
            }
            let mut p = Mat::zeros(q, q);
            for &l in lambda {
                for v in xi.iter_mut() {
                    *v = std_normal(&mut rng);
                }
                let w = l * inv_n;
                for i in 0..q {
                    let wi = w * xi[i];
                    let row = p.row_mut(i);
                    for k in 0..=i {
                        row[k] += wi * xi[k];
                    }
                }
            }
            for i in 0..q {
                for k in 0..i {
                    p[(k, i)] = p[(i, k)];
                }
            }
            // rank-deficient draws have probability zero; skip them if they occur
            if let Ok(ch) = Cholesky::new(&p) {
                draws.push(crate::numerics::dot(&xi0, &ch.solve_vec(&xi0)));
            }
        }
        draws.sort_by(f64::total_cmp);
        Ok(Self { b, q, n_grid, seed, draws })
    }

    /// Upper-tail critical value at `level`, i.e. the `(1 − level)` quantile.
    pub fn critical_value(&self, level: f64) -> f64 {
        crate::numerics::quantile_sorted(&self.draws, 1.0 - level)
    }

    /// Fraction of simulated draws at or above `w`.
    pub fn p_value(&self, w: f64) -> f64 {
        let below = self.draws.partition_point(|&d| d < w);
        (self.draws.len() - below) as f64 / self.draws.len() as f64
    }
}

/// HAR test referred to a fixed-b table built for the same `b` and `q`.
pub fn har_fixed_b_test(panel: &Panel, restr: &LinearRestriction, table: &FixedBTable) -> Result<TestOutcome> {
    if table.q != restr.q() {
        return Err(Error::DimensionMismatch(alloc::format!("table is for q={}, restriction has q={}", table.q, restr.q())));
    }
    let h = har_statistic(panel, restr, table.b)?;
    Ok(TestOutcome {
        method: TestMethod::Har,
        statistic: h.statistic,
        reference: Reference::FixedB { b: table.b, q: h.q },
        p_value: table.p_value(h.statistic),
        p_used: None,
        bootstrap: None,
    })
}
