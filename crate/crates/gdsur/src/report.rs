//! JSON documents written by the command line. Their layout is described by
//! `schemas/report-v1.schema.json`; bump [`SCHEMA_VERSION`] with it.

use gdsur_core::estimators::FitResult;
use gdsur_core::inference::{Reference, TestOutcome};
use serde::Serialize;

use crate::montecarlo::{McAccuracy, McConfig, McRejection};

pub const SCHEMA_VERSION: &str = "gdsur-report/1";

/// The schema shipped with this build.
pub const SCHEMA_JSON: &str = include_str!("../../../schemas/report-v1.schema.json");

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FitReport {
    pub schema_version: &'static str,
    pub kind: &'static str,
    pub method: &'static str,
    pub p_used: usize,
    pub t: usize,
    pub t_eff: usize,
    pub n: usize,
    pub r: usize,
    pub alpha: Vec<f64>,
    /// Equation-major slopes.
    pub beta: Vec<f64>,
    /// `√(diag V̂ / T_eff)`, absent for OLS.
    pub std_errors: Option<Vec<f64>>,
    pub sigma_uu: Vec<Vec<f64>>,
    pub bootstrap: Option<BiasBootstrap>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BiasBootstrap {
    pub replications: usize,
    pub seed: u64,
}

impl FitReport {
    pub fn new(fit: &FitResult, t: usize, bootstrap: Option<BiasBootstrap>) -> Self {
        let std_errors = fit
            .v_hat
            .as_ref()
            .map(|v| (0..v.rows()).map(|i| (v[(i, i)] / fit.t_eff as f64).sqrt()).collect());
        Self {
            schema_version: SCHEMA_VERSION,
            kind: "fit",
            method: fit.method.as_str(),
            p_used: fit.p_used,
            t,
            t_eff: fit.t_eff,
            n: fit.n,
            r: fit.r,
            alpha: fit.alpha().to_vec(),
            beta: fit.beta().to_vec(),
            std_errors,
            sigma_uu: (0..fit.sigma_uu_hat.rows()).map(|i| fit.sigma_uu_hat.row(i).to_vec()).collect(),
            bootstrap,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum ReferenceReport {
    Chi2 { df: usize },
    F { df1: usize, df2: usize },
    FixedB { b: f64, q: usize },
    Bootstrap { replications: usize },
}

impl From<Reference> for ReferenceReport {
    fn from(r: Reference) -> Self {
        match r {
            Reference::Chi2 { q } => ReferenceReport::Chi2 { df: q },
            Reference::F { d1, d2 } => ReferenceReport::F { df1: d1, df2: d2 },
            Reference::FixedB { b, q } => ReferenceReport::FixedB { b, q },
            Reference::Bootstrap { b1 } => ReferenceReport::Bootstrap { replications: b1 },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FdbReport {
    pub replications: usize,
    pub failed: usize,
    pub p_star: f64,
    pub q_star_star: f64,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TestReport {
    pub schema_version: &'static str,
    pub kind: &'static str,
    pub method: &'static str,
    pub null: &'static str,
    pub statistic: f64,
    /// Number of restrictions.
    pub df: usize,
    pub reference: ReferenceReport,
    pub p_value: f64,
    pub p_used: Option<usize>,
    pub bootstrap: Option<FdbReport>,
}

impl TestReport {
    pub fn new(out: &TestOutcome, df: usize, seed: Option<u64>) -> Self {
        let bootstrap = out.bootstrap.as_ref().map(|b| FdbReport {
            replications: b.w_star.len() + b.failed,
            failed: b.failed,
            p_star: b.p_star,
            q_star_star: b.q_star_star,
            seed: seed.unwrap_or_default(),
        });
        Self {
            schema_version: SCHEMA_VERSION,
            kind: "test",
            method: out.method.as_str(),
            null: "alpha-zero",
            statistic: out.statistic,
            df,
            reference: out.reference.into(),
            p_value: out.p_value,
            p_used: out.p_used,
            bootstrap,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EmpiricalReport {
    pub schema_version: &'static str,
    pub kind: &'static str,
    pub model: String,
    pub factors: Vec<String>,
    pub portfolios: Vec<String>,
    pub start: Option<String>,
    pub end: Option<String>,
    pub t: usize,
    pub p_used: usize,
    pub p_max: usize,
    pub gd_alpha: Vec<f64>,
    pub tests: Vec<TestReport>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum McRows {
    Accuracy(Vec<McAccuracy>),
    Size(Vec<McRejection>),
    Power { null: Vec<McRejection>, power: Vec<McRejection> },
}

/// Deterministic Monte Carlo output; run metadata goes to [`McManifest`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct McResults {
    pub schema_version: &'static str,
    pub kind: &'static str,
    pub mode: &'static str,
    pub config: McConfig,
    pub t_values: Vec<usize>,
    pub rows: McRows,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct McManifest {
    pub schema_version: &'static str,
    pub kind: &'static str,
    pub mode: &'static str,
    pub config: McConfig,
    pub t_values: Vec<usize>,
    pub seed: u64,
    /// How replication streams derive from the seed.
    pub stream_layout: &'static str,
    pub git_describe: Option<String>,
    pub threads: usize,
    pub started_unix: u64,
    pub wall_time_seconds: f64,
    pub files: Vec<String>,
}

pub const STREAM_LAYOUT: &str = "replication m uses stream (seed, m); substream 0 design, 1 sample, 2 bootstrap";

/// `git describe --always --dirty` of the working directory, if available.
pub fn git_describe() -> Option<String> {
    let out = std::process::Command::new("git").args(["describe", "--always", "--dirty"]).output().ok()?;
    out.status.success().then(|| String::from_utf8_lossy(&out.stdout).trim().to_string())
}
