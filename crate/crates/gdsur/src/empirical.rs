//! Tests of `α = 0` in a linear factor model estimated on return data.
//!
//! Unit-root screening of the factors is not performed here; run it
//! beforehand if the factor series may be nonstationary.

use gdsur_core::dgp::Panel;
use gdsur_core::estimators::{fit, select_lag_bic, Method};
use gdsur_core::inference::{wald, LinearRestriction};
use gdsur_core::RngStream;

use crate::error::{AppError, AppResult};
use crate::fdb::fdb_test_par;
use crate::report::{EmpiricalReport, TestReport, SCHEMA_VERSION};

pub const FF3_FACTORS: [&str; 3] = ["Mkt-RF", "SMB", "HML"];
pub const FF5_FACTORS: [&str; 5] = ["Mkt-RF", "SMB", "HML", "RMW", "CMA"];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FactorModel {
    Ff3,
    Ff5,
    /// Factor columns exactly as listed in the schema.
    Custom,
}

impl FactorModel {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "ff3" => Some(Self::Ff3),
            "ff5" => Some(Self::Ff5),
            "custom" => Some(Self::Custom),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Ff3 => "ff3",
            Self::Ff5 => "ff5",
            Self::Custom => "custom",
        }
    }

    /// Factor column names, or `None` to keep the schema's.
    pub fn factors(self) -> Option<&'static [&'static str]> {
        match self {
            Self::Ff3 => Some(&FF3_FACTORS),
            Self::Ff5 => Some(&FF5_FACTORS),
            Self::Custom => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EmpiricalOptions {
    /// Fixed lag order; BIC over `1..=p_max` when absent.
    pub p: Option<usize>,
    pub p_max: usize,
    pub b1: usize,
    pub seed: u64,
}

impl Default for EmpiricalOptions {
    fn default() -> Self {
        Self { p: None, p_max: 4, b1: 199, seed: 1 }
    }
}

/// FDB, GD, FGLS-D and FGLS-CO Wald tests of `α = 0`, in that order.
pub fn run_empirical(
    panel: &Panel,
    model: FactorModel,
    factors: &[String],
    portfolios: &[String],
    range: (Option<String>, Option<String>),
    opts: &EmpiricalOptions,
) -> AppResult<EmpiricalReport> {
    let (n, r) = (panel.n(), panel.r());
    let p = match opts.p {
        Some(p) => p,
        None => select_lag_bic(panel, opts.p_max)?,
    };
    let restr = LinearRestriction::alpha_zero(n, r);
    let fdb = fdb_test_par(panel, &restr, p, opts.b1, RngStream::new(opts.seed, 0))?;
    let gd = fit(panel, Method::Gd, p)?;
    let mut tests = vec![TestReport::new(&fdb, n, Some(opts.seed)), TestReport::new(&wald(&gd, &restr)?, n, None)];
    for m in [Method::FglsD, Method::FglsCo] {
        tests.push(TestReport::new(&wald(&fit(panel, m, p)?, &restr)?, n, None));
    }
    if tests.iter().any(|t| !t.p_value.is_finite()) {
        return Err(AppError::Numerical(gdsur_core::Error::NonFinite));
    }
    Ok(EmpiricalReport {
        schema_version: SCHEMA_VERSION,
        kind: "empirical",
        model: model.as_str().into(),
        factors: factors.to_vec(),
        portfolios: portfolios.to_vec(),
        start: range.0,
        end: range.1,
        t: panel.t(),
        p_used: p,
        p_max: opts.p_max,
        gd_alpha: gd.alpha().to_vec(),
        tests,
    })
}
