//! Monte Carlo job files: flat `key = value` lines, see `docs/config-format.md`.

use gdsur_core::dgp::Regime;
use gdsur_core::estimators::Method;
use gdsur_core::inference::TestMethod;
use serde::Deserialize;

use crate::montecarlo::{parse_qr_sign, McConfig, DEFAULT_ALTERNATIVE};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum McMode {
    Accuracy,
    Size,
    Power,
}

impl McMode {
    pub fn as_str(self) -> &'static str {
        match self {
            McMode::Accuracy => "accuracy",
            McMode::Size => "size",
            McMode::Power => "power",
        }
    }
}

/// A job: one [`McConfig`] per sample size.
#[derive(Clone, Debug, PartialEq)]
pub struct McPlan {
    pub mode: McMode,
    pub t_values: Vec<usize>,
    /// Shared settings; `base.t` is the first sample size.
    pub base: McConfig,
}

impl McPlan {
    pub fn cells(&self) -> impl Iterator<Item = McConfig> + '_ {
        self.t_values.iter().map(|&t| McConfig { t, ..self.base.clone() })
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum OneOrMany {
    One(usize),
    Many(Vec<usize>),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPlan {
    mode: String,
    regime: String,
    n: usize,
    r: usize,
    t: OneOrMany,
    reps: usize,
    seed: u64,
    p_max: Option<usize>,
    levels: Option<Vec<f64>>,
    alternative: Option<f64>,
    estimators: Option<Vec<String>>,
    tests: Option<Vec<String>>,
    b1: Option<usize>,
    b_bias: Option<usize>,
    har_b: Option<f64>,
    n_grid: Option<usize>,
    n_sims: Option<usize>,
    burn_in: Option<usize>,
    fixed_design: Option<bool>,
    qr_sign: Option<String>,
    iid_errors: Option<bool>,
    dump: Option<bool>,
}

/// Parses and validates a job file. Errors are human-readable messages.
pub fn parse_plan(text: &str) -> Result<McPlan, String> {
    let table: toml::Table = text.parse().map_err(|e: toml::de::Error| e.message().to_string())?;
    if let Some((k, _)) = table.iter().find(|(_, v)| v.is_table()) {
        return Err(format!("section or inline table {k:?} is not allowed; the format is flat"));
    }
    let raw: RawPlan = table.try_into().map_err(|e: toml::de::Error| e.message().to_string())?;
    let mode = match raw.mode.as_str() {
        "accuracy" => McMode::Accuracy,
        "size" => McMode::Size,
        "power" => McMode::Power,
        m => return Err(format!("unknown mode {m:?}; expected accuracy, size or power")),
    };
    let regime = Regime::parse(&raw.regime).ok_or_else(|| format!("unknown regime {:?}", raw.regime))?;
    let t_values = match raw.t {
        OneOrMany::One(t) => vec![t],
        OneOrMany::Many(v) => v,
    };
    let Some(&t0) = t_values.first() else { return Err("t must list at least one sample size".into()) };
    let mut c = McConfig::new(regime, raw.n, raw.r, t0, raw.reps, raw.seed);
    if let Some(v) = raw.p_max {
        c.p_max = v;
    }
    if let Some(v) = raw.levels {
        c.levels = v;
    }
    c.alternative = match (mode, raw.alternative) {
        (McMode::Power, None) => Some(DEFAULT_ALTERNATIVE),
        (_, a) => a,
    };
    if let Some(v) = raw.estimators {
        c.estimators = v
            .iter()
            .map(|s| Method::parse(s).ok_or_else(|| format!("unknown estimator {s:?}")))
            .collect::<Result<_, _>>()?;
    }
    if let Some(v) = raw.tests {
        c.tests = v
            .iter()
            .map(|s| TestMethod::parse(s).ok_or_else(|| format!("unknown test {s:?}")))
            .collect::<Result<_, _>>()?;
    }
    if let Some(v) = raw.b1 {
        c.b1 = v;
    }
    if let Some(v) = raw.b_bias {
        c.b_bias = v;
    }
    if let Some(v) = raw.har_b {
        c.har_b = v;
    }
    if let Some(v) = raw.n_grid {
        c.n_grid = v;
    }
    if let Some(v) = raw.n_sims {
        c.n_sims = v;
    }
    if let Some(v) = raw.burn_in {
        c.burn_in = v;
    }
    if let Some(v) = raw.fixed_design {
        c.fixed_design = v;
    }
    if let Some(v) = raw.qr_sign {
        c.qr_sign = parse_qr_sign(&v).ok_or_else(|| format!("unknown qr_sign {v:?}"))?;
    }
    if let Some(v) = raw.iid_errors {
        c.iid_errors = v;
    }
    if let Some(v) = raw.dump {
        c.dump = v;
    }
    c.validate().map_err(|e| e.to_string())?;
    Ok(McPlan { mode, t_values, base: c })
}
