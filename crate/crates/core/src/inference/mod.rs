//! Wald, GRS and fixed-b HAR tests of linear restrictions on `κ`.

mod grs;
mod har;

use alloc::vec::Vec;

pub use grs::grs_test;
pub use har::{
    har_fixed_b_test, har_statistic, kernel_eigenvalues, qs_kernel, qs_long_run_covariance, FixedBTable, HarStatistic,
    DEFAULT_B, DEFAULT_N_GRID, DEFAULT_N_SIMS,
};

use crate::error::{Error, Result};
use crate::estimators::FitResult;
use crate::numerics::{chi2_sf, Cholesky, Mat};

/// `H₀: R κ = r`.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearRestriction {
    pub r_mat: Mat,
    pub r_vec: Vec<f64>,
}

impl LinearRestriction {
    pub fn new(r_mat: Mat, r_vec: Vec<f64>) -> Result<Self> {
        if r_mat.rows() != r_vec.len() || r_mat.rows() == 0 || r_mat.rows() > r_mat.cols() {
            return Err(Error::DimensionMismatch(alloc::format!(
                "restriction is {}x{} with {} targets",
                r_mat.rows(),
                r_mat.cols(),
                r_vec.len()
            )));
        }
        Ok(Self { r_mat, r_vec })
    }

    /// All `N` intercepts equal zero.
    pub fn alpha_zero(n: usize, r: usize) -> Self {
        let mut r_mat = Mat::zeros(n, n * (1 + r));
        for i in 0..n {
            r_mat[(i, i)] = 1.0;
        }
        Self { r_mat, r_vec: alloc::vec![0.0; n] }
    }

    pub fn q(&self) -> usize {
        self.r_mat.rows()
    }

    /// `R κ − r`.
    pub fn discrepancy(&self, kappa: &[f64]) -> Vec<f64> {
        let mut d = self.r_mat.matvec(kappa);
        for (v, t) in d.iter_mut().zip(&self.r_vec) {
            *v -= t;
        }
        d
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TestMethod {
    WaldGd,
    WaldFglsD,
    WaldFglsCo,
    Grs,
    Har,
    Fdb,
}

impl TestMethod {
    pub const ALL: [TestMethod; 6] =
        [TestMethod::WaldGd, TestMethod::WaldFglsD, TestMethod::WaldFglsCo, TestMethod::Grs, TestMethod::Har, TestMethod::Fdb];

    pub fn as_str(self) -> &'static str {
        match self {
            TestMethod::WaldGd => "wald-gd",
            TestMethod::WaldFglsD => "wald-fgls-d",
            TestMethod::WaldFglsCo => "wald-fgls-co",
            TestMethod::Grs => "grs",
            TestMethod::Har => "har",
            TestMethod::Fdb => "fdb",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|m| m.as_str().eq_ignore_ascii_case(s))
    }
}

/// Law against which the statistic is referred.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Reference {
    Chi2 { q: usize },
    F { d1: usize, d2: usize },
    FixedB { b: f64, q: usize },
    Bootstrap { b1: usize },
}

/// Fast-double-bootstrap diagnostics.
#[derive(Clone, Debug, PartialEq)]
pub struct BootstrapAux {
    /// Single-bootstrap p-value `p̂*`.
    pub p_star: f64,
    /// `q**`, the `(1 − p̂*)` quantile of the inner statistics.
    pub q_star_star: f64,
    pub failed: usize,
    pub w_star: Vec<f64>,
    pub w_star_star: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TestOutcome {
    pub method: TestMethod,
    pub statistic: f64,
    pub reference: Reference,
    pub p_value: f64,
    pub p_used: Option<usize>,
    pub bootstrap: Option<BootstrapAux>,
}

fn restriction_metric(v: &Mat, restr: &LinearRestriction) -> Result<Cholesky> {
    if v.rows() != restr.r_mat.cols() {
        return Err(Error::DimensionMismatch(alloc::format!(
            "restriction has {} columns, V is {}x{}",
            restr.r_mat.cols(),
            v.rows(),
            v.cols()
        )));
    }
    let rvr = restr.r_mat.matmul(v).matmul_t(&restr.r_mat).symmetrize();
    Cholesky::new(&rvr).map_err(|_| Error::SingularRestriction)
}

/// `T_eff (Rκ̂ − r)ᵀ [R V̂ Rᵀ]⁻¹ (Rκ̂ − r)`.
pub fn wald_statistic(kappa: &[f64], v: &Mat, t_eff: usize, restr: &LinearRestriction) -> Result<f64> {
    let ch = restriction_metric(v, restr)?;
    let d = restr.discrepancy(kappa);
    let sol = ch.solve_vec(&d);
    Ok(t_eff as f64 * crate::numerics::dot(&d, &sol))
}

/// Asymptotic χ²_q Wald test.
pub fn wald(fit: &FitResult, restr: &LinearRestriction) -> Result<TestOutcome> {
    let v = fit
        .v_hat
        .as_ref()
        .ok_or_else(|| Error::InvalidParams(alloc::format!("{} fit carries no covariance", fit.method.as_str())))?;
    let w = wald_statistic(&fit.kappa_hat, v, fit.t_eff, restr)?;
    let method = match fit.method {
        crate::estimators::Method::FglsD => TestMethod::WaldFglsD,
        crate::estimators::Method::FglsCo => TestMethod::WaldFglsCo,
        _ => TestMethod::WaldGd,
    };
    Ok(TestOutcome {
        method,
        statistic: w,
        reference: Reference::Chi2 { q: restr.q() },
        p_value: chi2_sf(w, restr.q()),
        p_used: Some(fit.p_used),
        bootstrap: None,
    })
}

/// `κ̃ = κ̂ − V Rᵀ (R V Rᵀ)⁻¹ (R κ̂ − r)`.
pub fn restrict(kappa: &[f64], v: &Mat, restr: &LinearRestriction) -> Result<Vec<f64>> {
    let ch = restriction_metric(v, restr)?;
    let lam = ch.solve_vec(&restr.discrepancy(kappa));
    let vr = v.matmul_t(&restr.r_mat);
    let shift = vr.matvec(&lam);
    let mut out: Vec<f64> = kappa.iter().zip(shift).map(|(k, s)| k - s).collect();
    // rows that fix a single coordinate are imposed exactly, not up to rounding
    for (i, target) in restr.r_vec.iter().enumerate() {
        let row = restr.r_mat.row(i);
        let mut nz = row.iter().enumerate().filter(|(_, v)| **v != 0.0);
        if let (Some((j, c)), None) = (nz.next(), nz.next()) {
            out[j] = target / c;
        }
    }
    Ok(out)
}

pub fn restricted_estimate(fit: &FitResult, restr: &LinearRestriction) -> Result<Vec<f64>> {
    let v = fit.v_hat.as_ref().ok_or(Error::SingularRestriction)?;
    restrict(&fit.kappa_hat, v, restr)
}

#[cfg(test)]
mod tests;
