//! OLS, FGLS-CO, FGLS-D and generalized-Durbin (GD) estimators of
//! `κ = (α', β')'`, plus BIC lag selection.

mod durbin;
pub(crate) mod gls;
mod var;

use alloc::vec::Vec;

pub use durbin::{durbin_stage, durbin_stage_on, durbin_width, DurbinStage};
pub use gls::{filtered_gls, Filter};
pub use var::{fit_var, VarFit};

use crate::dgp::Panel;
use crate::error::{Error, Result};
use crate::numerics::Mat;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Method {
    Ols,
    FglsCo,
    FglsD,
    Gd,
    BcGd,
}

impl Method {
    pub const ALL: [Method; 5] = [Method::Ols, Method::FglsCo, Method::FglsD, Method::Gd, Method::BcGd];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Ols => "ols",
            Method::FglsCo => "fgls-co",
            Method::FglsD => "fgls-d",
            Method::Gd => "gd",
            Method::BcGd => "bc-gd",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|m| m.as_str().eq_ignore_ascii_case(s))
    }
}

/// Common output of every estimator.
#[derive(Clone, Debug, PartialEq)]
pub struct FitResult {
    pub method: Method,
    /// `(α̂', β̂')'`, length `N(1+r)`, `β̂` equation-major.
    pub kappa_hat: Vec<f64>,
    /// Asymptotic covariance of `√T_eff (κ̂ − κ)`; absent for OLS.
    pub v_hat: Option<Mat>,
    pub sigma_uu_hat: Mat,
    pub p_used: usize,
    pub t_eff: usize,
    /// Residuals of the estimated (transformed) equations, `T_eff × N`.
    pub residuals: Mat,
    pub n: usize,
    pub r: usize,
    /// First-stage output for FGLS-D and GD.
    pub stage: Option<DurbinStage>,
}

impl FitResult {
    pub fn alpha(&self) -> &[f64] {
        &self.kappa_hat[..self.n]
    }

    pub fn beta(&self) -> &[f64] {
        &self.kappa_hat[self.n..]
    }
}

pub fn ols_fit(panel: &Panel) -> Result<FitResult> {
    let mut fit = filtered_gls(panel, &Filter::identity(panel.n(), panel.r()), 0, Method::Ols)?;
    fit.v_hat = None;
    fit.p_used = 0;
    let t = fit.residuals.rows() as f64;
    fit.sigma_uu_hat = fit.residuals.t_matmul(&fit.residuals).scale(1.0 / t).symmetrize();
    Ok(fit)
}

/// Cochrane–Orcutt-type FGLS: VAR(p) on the OLS residuals, then GLS on the
/// quasi-differenced system.
pub fn fgls_co_fit(panel: &Panel, p: usize) -> Result<FitResult> {
    check_p(p)?;
    let ols = ols_fit(panel)?;
    let var = fit_var(&ols.residuals, p, p)?;
    let filter = Filter { psi: var.phi, psi_ux: Vec::new(), mu_x: alloc::vec![0.0; panel.r()], sigma: var.sigma };
    filtered_gls(panel, &filter, p, Method::FglsCo)
}

/// FGLS-D: Durbin first stage, then GLS filtered by `Ψ̂uu` only.
pub fn fglsd_fit(panel: &Panel, p: usize) -> Result<FitResult> {
    check_p(p)?;
    fglsd_from_stage(panel, durbin_stage(panel, p)?)
}

pub fn fglsd_from_stage(panel: &Panel, stage: DurbinStage) -> Result<FitResult> {
    let filter =
        Filter { psi: stage.psi_uu.clone(), psi_ux: Vec::new(), mu_x: stage.mu_x.clone(), sigma: stage.sigma_uu.clone() };
    let mut fit = filtered_gls(panel, &filter, stage.start, Method::FglsD)?;
    fit.stage = Some(stage);
    Ok(fit)
}

/// Generalized-Durbin feasible GLS.
pub fn gd_fit(panel: &Panel, p: usize) -> Result<FitResult> {
    check_p(p)?;
    gd_from_stage(panel, durbin_stage(panel, p)?)
}

/// GD with the nuisance quantities taken from `stage`.
pub fn gd_from_stage(panel: &Panel, stage: DurbinStage) -> Result<FitResult> {
    let filter = Filter {
        psi: stage.psi_uu.clone(),
        psi_ux: stage.psi_ux.clone(),
        mu_x: stage.mu_x.clone(),
        sigma: stage.sigma_uu.clone(),
    };
    let mut fit = filtered_gls(panel, &filter, stage.start, Method::Gd)?;
    fit.stage = Some(stage);
    Ok(fit)
}

fn check_p(p: usize) -> Result<()> {
    if p == 0 {
        return Err(Error::InvalidParams("lag order must be at least 1".into()));
    }
    Ok(())
}

/// Total Durbin coefficient count `N + N·r + p·N² + p·N·r`.
pub fn bic_param_count(n: usize, r: usize, p: usize) -> usize {
    n * durbin::durbin_width(n, r, p)
}

/// `BIC(p)` for `p = 1..=p_max`, all on rows `p_max..T`.
pub fn bic_values(panel: &Panel, p_max: usize) -> Result<Vec<f64>> {
    check_p(p_max)?;
    let t = panel.t() as f64;
    (1..=p_max)
        .map(|p| {
            let st = durbin_stage_on(panel, p, p_max)?;
            let ld = crate::numerics::Cholesky::new(&st.sigma_uu)?.log_det();
            Ok(ld + bic_param_count(panel.n(), panel.r(), p) as f64 * t.ln() / t)
        })
        .collect()
}

/// Smallest minimizer of the BIC over `1..=p_max`.
pub fn select_lag_bic(panel: &Panel, p_max: usize) -> Result<usize> {
    let v = bic_values(panel, p_max)?;
    let mut best = 0;
    for (i, b) in v.iter().enumerate() {
        if *b < v[best] {
            best = i;
        }
    }
    Ok(best + 1)
}

/// Dispatch for the non-bootstrap estimators.
pub fn fit(panel: &Panel, method: Method, p: usize) -> Result<FitResult> {
    match method {
        Method::Ols => ols_fit(panel),
        Method::FglsCo => fgls_co_fit(panel, p),
        Method::FglsD => fglsd_fit(panel, p),
        Method::Gd => gd_fit(panel, p),
        Method::BcGd => Err(Error::InvalidParams("bc-gd needs a bootstrap budget and stream".into())),
    }
}

#[cfg(test)]
mod tests;
