//! Replication-parallel accuracy, size and size-adjusted power experiments.
//!
//! Replication `m` owns `RngStream::new(seed, m)`: substream 0 draws the
//! design, 1 the sample, 2 the bootstrap budget. Results are reduced in
//! replication order, so tables do not depend on the thread count.

use std::sync::Arc;

use gdsur_core::bootstrap::{bc_gd_fit, fdb_test};
use gdsur_core::dgp::{build_block_var, simulate, BlockVarSpec, Calibration, DesignConfig, Panel, Regime, SystemParams};
use gdsur_core::estimators::{fit, select_lag_bic, Method};
use gdsur_core::inference::{grs_test, har_fixed_b_test, wald, FixedBTable, LinearRestriction, TestMethod};
use gdsur_core::numerics::{empirical_quantile, QrSign};
use gdsur_core::{Error, Result, RngStream};
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::fixedb::{FixedBCache, TableSpec};

pub const DEFAULT_LEVELS: [f64; 3] = [0.10, 0.05, 0.01];
pub const DEFAULT_ALTERNATIVE: f64 = 0.2;
/// Cells with a larger share of failed replications are flagged invalid.
pub const MAX_FAILURE_SHARE: f64 = 0.01;
const CHUNK: usize = 256;

fn ser_regime<S: Serializer>(r: &Regime, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(r.as_str())
}
fn ser_method<S: Serializer>(m: &Method, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(m.as_str())
}
fn ser_test<S: Serializer>(m: &TestMethod, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(m.as_str())
}
fn ser_methods<S: Serializer>(m: &[Method], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(m.iter().map(|m| m.as_str()))
}
fn ser_tests<S: Serializer>(m: &[TestMethod], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(m.iter().map(|m| m.as_str()))
}
fn ser_qr_sign<S: Serializer>(q: &QrSign, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(qr_sign_name(*q))
}

pub fn qr_sign_name(q: QrSign) -> &'static str {
    match q {
        QrSign::PositiveDiagonal => "positive-diagonal",
        QrSign::Householder => "householder",
    }
}

pub fn parse_qr_sign(s: &str) -> Option<QrSign> {
    match s {
        "positive-diagonal" => Some(QrSign::PositiveDiagonal),
        "householder" => Some(QrSign::Householder),
        _ => None,
    }
}

/// One Monte Carlo cell.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct McConfig {
    #[serde(serialize_with = "ser_regime")]
    pub regime: Regime,
    pub n: usize,
    pub r: usize,
    pub t: usize,
    pub reps: usize,
    pub seed: u64,
    pub p_max: usize,
    pub levels: Vec<f64>,
    /// `α₁` under the alternative.
    pub alternative: Option<f64>,
    #[serde(serialize_with = "ser_methods")]
    pub estimators: Vec<Method>,
    #[serde(serialize_with = "ser_tests")]
    pub tests: Vec<TestMethod>,
    pub b1: usize,
    pub b_bias: usize,
    pub har_b: f64,
    pub n_grid: usize,
    pub n_sims: usize,
    pub burn_in: usize,
    /// Draw one design for the whole cell instead of one per replication.
    pub fixed_design: bool,
    #[serde(serialize_with = "ser_qr_sign")]
    pub qr_sign: QrSign,
    /// Calibration world: no error dynamics and no `x`–`u` feedback, so the
    /// disturbances are i.i.d. Gaussian and GRS is exact.
    pub iid_errors: bool,
    /// Keep every replication's estimates in [`McAccuracy::dump`].
    pub dump: bool,
}

impl McConfig {
    pub fn new(regime: Regime, n: usize, r: usize, t: usize, reps: usize, seed: u64) -> Self {
        Self {
            regime,
            n,
            r,
            t,
            reps,
            seed,
            p_max: 4,
            levels: DEFAULT_LEVELS.to_vec(),
            alternative: None,
            estimators: vec![Method::Ols, Method::FglsCo, Method::FglsD, Method::Gd, Method::BcGd],
            tests: vec![
                TestMethod::WaldGd,
                TestMethod::WaldFglsD,
                TestMethod::WaldFglsCo,
                TestMethod::Grs,
                TestMethod::Har,
                TestMethod::Fdb,
            ],
            b1: 199,
            b_bias: 99,
            har_b: gdsur_core::inference::DEFAULT_B,
            n_grid: gdsur_core::inference::DEFAULT_N_GRID,
            n_sims: gdsur_core::inference::DEFAULT_N_SIMS,
            burn_in: 500,
            fixed_design: false,
            qr_sign: QrSign::Householder,
            iid_errors: false,
            dump: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParams(m));
        if self.reps == 0 {
            return bad("reps must be at least 1".into());
        }
        if self.n == 0 || self.r == 0 {
            return bad("N and r must be positive".into());
        }
        if self.p_max == 0 {
            return bad("p_max must be at least 1".into());
        }
        if let Some(l) = self.levels.iter().find(|l| !(**l > 0.0 && **l < 1.0)) {
            return bad(format!("nominal level {l} outside (0, 1)"));
        }
        if self.alternative.is_some_and(|a| !a.is_finite()) {
            return bad("alternative shift must be finite".into());
        }
        if self.b1 == 0 {
            return bad("b1 must be positive".into());
        }
        Ok(())
    }

    pub fn design(&self) -> DesignConfig {
        let mut d = DesignConfig { qr_sign: self.qr_sign, ..DesignConfig::baseline(self.regime, self.r, self.n) };
        if self.iid_errors {
            d.c = Calibration { cxu: 0.0, cux: 0.0, cuu: 0.0, ..d.c };
        }
        d
    }

    fn streams(&self, rep: usize) -> (RngStream, RngStream, RngStream) {
        let s = RngStream::new(self.seed, rep as u64);
        let design = if self.fixed_design { RngStream::new(self.seed, 0).substream(0) } else { s.substream(0) };
        (design, s.substream(1), s.substream(2))
    }

    /// The sample of replication `rep` under `params`.
    pub fn simulate_rep(&self, params: &SystemParams, rep: usize) -> Result<Panel> {
        let (design, sim, _) = self.streams(rep);
        let spec: BlockVarSpec = build_block_var(&self.design(), design)?;
        simulate(&spec, params, self.t, self.burn_in, sim)
    }

    fn null_params(&self) -> SystemParams {
        SystemParams::null(self.n, self.r)
    }
}

/// Streaming mean and scatter of a vector.
#[derive(Clone, Debug, PartialEq)]
pub struct VecWelford {
    pub count: usize,
    pub mean: Vec<f64>,
    pub m2: Vec<f64>,
}

impl VecWelford {
    pub fn new(dim: usize) -> Self {
        Self { count: 0, mean: vec![0.0; dim], m2: vec![0.0; dim] }
    }

    pub fn push(&mut self, x: &[f64]) {
        self.count += 1;
        let n = self.count as f64;
        for ((m, s), &v) in self.mean.iter_mut().zip(self.m2.iter_mut()).zip(x) {
            let d = v - *m;
            *m += d / n;
            *s += d * (v - *m);
        }
    }

    /// `tr Var` with divisor `count`.
    pub fn trace_var(&self) -> f64 {
        if self.count == 0 {
            return f64::NAN;
        }
        self.m2.iter().sum::<f64>() / self.count as f64
    }
}

/// `1.96·√(p(1−p)/n)`.
pub fn binomial_half_width(p: f64, n: usize) -> f64 {
    if n == 0 {
        return f64::NAN;
    }
    1.96 * (p * (1.0 - p) / n as f64).sqrt()
}

fn cell_valid(failures: usize, reps: usize) -> bool {
    failures as f64 <= MAX_FAILURE_SHARE * reps as f64
}

/// Runs `f` over `0..reps` in parallel chunks and feeds results to `sink`
/// in replication order.
fn for_each_rep<T: Send>(reps: usize, f: impl Fn(usize) -> T + Sync, mut sink: impl FnMut(usize, T)) {
    let mut start = 0;
    while start < reps {
        let end = (start + CHUNK).min(reps);
        let out: Vec<T> = (start..end).into_par_iter().map(&f).collect();
        for (i, o) in out.into_iter().enumerate() {
            sink(start + i, o);
        }
        log::debug!("replications {end}/{reps} done");
        start = end;
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AccuracyCell {
    #[serde(serialize_with = "ser_method")]
    pub method: Method,
    pub bias: f64,
    pub variance_trace: f64,
    /// `bias² + variance_trace`.
    pub mse: f64,
    pub successes: usize,
    pub failures: usize,
    pub valid: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct McAccuracy {
    pub t: usize,
    pub cells: Vec<AccuracyCell>,
    /// `lag_counts[p−1]` replications chose lag `p` by BIC.
    pub lag_counts: Vec<usize>,
    pub lag_failures: usize,
    #[serde(skip)]
    pub dump: Option<Vec<Vec<Option<Vec<f64>>>>>,
}

impl McAccuracy {
    pub fn cell(&self, m: Method) -> Option<&AccuracyCell> {
        self.cells.iter().find(|c| c.method == m)
    }
}

fn estimate(cfg: &McConfig, panel: &Panel, m: Method, p: usize, boot: RngStream) -> Result<Vec<f64>> {
    let f = match m {
        Method::BcGd => bc_gd_fit(panel, p, cfg.b_bias, boot.substream(0))?,
        _ => fit(panel, m, p)?,
    };
    Ok(f.kappa_hat)
}

/// Scalar bias and MSE of each roster estimator around `κ₀ = (0', 1')'`.
pub fn run_accuracy(cfg: &McConfig) -> Result<McAccuracy> {
    cfg.validate()?;
    let params = cfg.null_params();
    let kappa0 = params.kappa();
    let k = kappa0.len();
    let mut acc: Vec<VecWelford> = cfg.estimators.iter().map(|_| VecWelford::new(k)).collect();
    let mut failures = vec![0usize; cfg.estimators.len()];
    let mut lag_counts = vec![0usize; cfg.p_max];
    let mut lag_failures = 0;
    let mut dump = cfg.dump.then(Vec::new);
    let one = |rep: usize| -> (Option<usize>, Vec<Option<Vec<f64>>>) {
        let (_, _, boot) = cfg.streams(rep);
        let panel = match cfg.simulate_rep(&params, rep) {
            Ok(p) => p,
            Err(e) => {
                log::warn!("replication {rep}: simulation failed: {e}");
                return (None, vec![None; cfg.estimators.len()]);
            }
        };
        let p = select_lag_bic(&panel, cfg.p_max).ok();
        let est = cfg
            .estimators
            .iter()
            .map(|&m| {
                let p = if m == Method::Ols { p.unwrap_or(1) } else { p? };
                estimate(cfg, &panel, m, p, boot).map_err(|e| log::debug!("replication {rep}: {}: {e}", m.as_str())).ok()
            })
            .collect();
        (p, est)
    };
    for_each_rep(cfg.reps, one, |_, (p, est)| {
        match p {
            Some(p) => lag_counts[p - 1] += 1,
            None => lag_failures += 1,
        }
        for (i, e) in est.iter().enumerate() {
            match e {
                Some(kh) => acc[i].push(kh),
                None => failures[i] += 1,
            }
        }
        if let Some(d) = dump.as_mut() {
            d.push(est);
        }
    });
    let cells = cfg
        .estimators
        .iter()
        .zip(acc.iter().zip(&failures))
        .map(|(&method, (w, &fail))| {
            let bias = w.mean.iter().zip(&kappa0).map(|(m, k)| (m - k).powi(2)).sum::<f64>().sqrt();
            let variance_trace = w.trace_var();
            AccuracyCell {
                method,
                bias: if w.count == 0 { f64::NAN } else { bias },
                variance_trace,
                mse: bias * bias + variance_trace,
                successes: w.count,
                failures: fail,
                valid: w.count > 0 && cell_valid(fail, cfg.reps),
            }
        })
        .collect();
    Ok(McAccuracy { t: cfg.t, cells, lag_counts, lag_failures, dump })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RejectionCell {
    #[serde(serialize_with = "ser_test")]
    pub test: TestMethod,
    pub level: f64,
    /// p-value cutoff: the nominal level, or the empirical null quantile
    /// for size-adjusted power.
    pub threshold: f64,
    pub rate: f64,
    pub half_width: f64,
    pub successes: usize,
    pub failures: usize,
    pub valid: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct McRejection {
    pub t: usize,
    pub cells: Vec<RejectionCell>,
    pub lag_counts: Vec<usize>,
    pub lag_failures: usize,
    /// `p_values[test][rep]`, `None` for failed replications.
    #[serde(skip)]
    pub p_values: Vec<Vec<Option<f64>>>,
    /// Observed statistics, laid out like `p_values`.
    #[serde(skip)]
    pub statistics: Vec<Vec<Option<f64>>>,
}

impl McRejection {
    pub fn cell(&self, test: TestMethod, level: f64) -> Option<&RejectionCell> {
        self.cells.iter().find(|c| c.test == test && c.level == level)
    }

    fn test_index(&self, cfg: &McConfig, test: TestMethod) -> Option<usize> {
        cfg.tests.iter().position(|&t| t == test)
    }

    /// Successful p-values of `test`.
    pub fn p_values_of(&self, cfg: &McConfig, test: TestMethod) -> Vec<f64> {
        self.test_index(cfg, test).map(|i| self.p_values[i].iter().flatten().copied().collect()).unwrap_or_default()
    }

    pub fn statistics_of(&self, cfg: &McConfig, test: TestMethod) -> Vec<f64> {
        self.test_index(cfg, test).map(|i| self.statistics[i].iter().flatten().copied().collect()).unwrap_or_default()
    }
}

/// Fixed-b table for the HAR test of `α = 0` in this cell.
pub fn har_table(cfg: &McConfig) -> Result<Arc<FixedBTable>> {
    let spec = TableSpec { n_grid: cfg.n_grid, n_sims: cfg.n_sims, ..TableSpec::new(cfg.har_b, cfg.n) };
    FixedBCache::global().table(spec)
}

struct TestContext {
    restr: LinearRestriction,
    table: Option<Arc<FixedBTable>>,
}

fn run_test(cfg: &McConfig, ctx: &TestContext, test: TestMethod, panel: &Panel, p: Option<usize>, boot: RngStream) -> Result<(f64, f64)> {
    let need_p = || p.ok_or(Error::InvalidParams("lag selection failed".into()));
    let out = match test {
        TestMethod::WaldGd => wald(&fit(panel, Method::Gd, need_p()?)?, &ctx.restr)?,
        TestMethod::WaldFglsD => wald(&fit(panel, Method::FglsD, need_p()?)?, &ctx.restr)?,
        TestMethod::WaldFglsCo => wald(&fit(panel, Method::FglsCo, need_p()?)?, &ctx.restr)?,
        TestMethod::Grs => grs_test(panel)?,
        TestMethod::Har => har_fixed_b_test(panel, &ctx.restr, ctx.table.as_ref().expect("HAR table"))?,
        TestMethod::Fdb => fdb_test(panel, &ctx.restr, need_p()?, cfg.b1, boot.substream(1))?,
    };
    Ok((out.statistic, out.p_value))
}

/// Rejection frequencies of `α = 0` in samples drawn under `params`, with
/// per-test, per-level p-value cutoffs `thresholds[test][level]`.
fn run_rejections(cfg: &McConfig, params: &SystemParams, thresholds: &[Vec<Option<f64>>]) -> Result<McRejection> {
    cfg.validate()?;
    let ctx = TestContext {
        restr: LinearRestriction::alpha_zero(cfg.n, cfg.r),
        table: if cfg.tests.contains(&TestMethod::Har) { Some(har_table(cfg)?) } else { None },
    };
    let nt = cfg.tests.len();
    let mut p_values = vec![Vec::with_capacity(cfg.reps); nt];
    let mut statistics = vec![Vec::with_capacity(cfg.reps); nt];
    let mut lag_counts = vec![0usize; cfg.p_max];
    let mut lag_failures = 0;
    let one = |rep: usize| -> (Option<usize>, Vec<Option<(f64, f64)>>) {
        let (_, _, boot) = cfg.streams(rep);
        let panel = match cfg.simulate_rep(params, rep) {
            Ok(p) => p,
            Err(e) => {
                log::warn!("replication {rep}: simulation failed: {e}");
                return (None, vec![None; nt]);
            }
        };
        let p = select_lag_bic(&panel, cfg.p_max).ok();
        let out = cfg
            .tests
            .iter()
            .map(|&test| {
                run_test(cfg, &ctx, test, &panel, p, boot)
                    .map_err(|e| log::debug!("replication {rep}: {}: {e}", test.as_str()))
                    .ok()
            })
            .collect();
        (p, out)
    };
    for_each_rep(cfg.reps, one, |_, (p, out)| {
        match p {
            Some(p) => lag_counts[p - 1] += 1,
            None => lag_failures += 1,
        }
        for (i, o) in out.into_iter().enumerate() {
            p_values[i].push(o.map(|v| v.1));
            statistics[i].push(o.map(|v| v.0));
        }
    });
    let mut cells = Vec::new();
    for (i, &test) in cfg.tests.iter().enumerate() {
        let ok: Vec<f64> = p_values[i].iter().flatten().copied().collect();
        let failures = cfg.reps - ok.len();
        for (j, &level) in cfg.levels.iter().enumerate() {
            let threshold = thresholds[i][j];
            let (rate, valid) = match threshold {
                Some(c) if !ok.is_empty() => {
                    (ok.iter().filter(|&&p| p <= c).count() as f64 / ok.len() as f64, cell_valid(failures, cfg.reps))
                }
                _ => (f64::NAN, false),
            };
            cells.push(RejectionCell {
                test,
                level,
                threshold: threshold.unwrap_or(f64::NAN),
                rate,
                half_width: binomial_half_width(rate, ok.len()),
                successes: ok.len(),
                failures,
                valid,
            });
        }
    }
    Ok(McRejection { t: cfg.t, cells, lag_counts, lag_failures, p_values, statistics })
}

/// Empirical size of each roster test at each nominal level, with `α = 0`.
pub fn run_size(cfg: &McConfig) -> Result<McRejection> {
    let nominal: Vec<Vec<Option<f64>>> = cfg.tests.iter().map(|_| cfg.levels.iter().map(|&l| Some(l)).collect()).collect();
    run_rejections(cfg, &cfg.null_params(), &nominal)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct McPower {
    pub null: McRejection,
    pub power: McRejection,
}

/// Size-adjusted power: the seed-matched null run fixes each test's
/// empirical p-value cutoff, which the alternative run then applies.
pub fn run_power(cfg: &McConfig) -> Result<McPower> {
    let null = run_size(cfg)?;
    let power = run_power_with_null(cfg, &null)?;
    Ok(McPower { null, power })
}

/// [`run_power`] reusing a null run made with the same configuration.
pub fn run_power_with_null(cfg: &McConfig, null: &McRejection) -> Result<McRejection> {
    let shift = cfg
        .alternative
        .ok_or_else(|| Error::InvalidParams("power run needs an alternative".into()))?;
    if null.p_values.len() != cfg.tests.len() || null.p_values.iter().any(|v| v.len() != cfg.reps) {
        return Err(Error::DimensionMismatch("null run does not match the configuration".into()));
    }
    let thresholds: Vec<Vec<Option<f64>>> = cfg
        .tests
        .iter()
        .enumerate()
        .map(|(i, &test)| {
            let ok: Vec<f64> = null.p_values[i].iter().flatten().copied().collect();
            let valid = !ok.is_empty() && cell_valid(cfg.reps - ok.len(), cfg.reps);
            cfg.levels
                .iter()
                .map(|&l| {
                    let c = if valid { empirical_quantile(&ok, l).ok() } else { None };
                    if c.is_none() {
                        log::warn!("{}: no valid null cutoff at level {l}", test.as_str());
                    }
                    c
                })
                .collect()
        })
        .collect();
    run_rejections(cfg, &SystemParams::alternative(cfg.n, cfg.r, shift), &thresholds)
}

fn fmt(v: f64) -> String {
    if v.is_nan() {
        String::new()
    } else {
        format!("{v}")
    }
}

fn level_tag(l: f64) -> String {
    format!("{}", (l * 1e4).round() / 1e2)
}

/// Wide table, one row per `T`: `<method>_bias`, `<method>_mse` columns.
/// Invalid cells are left empty.
pub fn accuracy_table_csv(rows: &[McAccuracy]) -> String {
    let Some(first) = rows.first() else { return String::new() };
    let mut out = String::from("T");
    for c in &first.cells {
        let m = c.method.as_str();
        out.push_str(&format!(",{m}_bias,{m}_mse"));
    }
    out.push('\n');
    for row in rows {
        out.push_str(&row.t.to_string());
        for c in &row.cells {
            let (b, m) = if c.valid { (c.bias, c.mse) } else { (f64::NAN, f64::NAN) };
            out.push_str(&format!(",{},{}", fmt(b), fmt(m)));
        }
        out.push('\n');
    }
    out
}

/// Wide table, one row per `T`: `<test>_<level%>` rates and `_hw` half-widths.
pub fn rejection_table_csv(rows: &[McRejection]) -> String {
    let Some(first) = rows.first() else { return String::new() };
    let mut out = String::from("T");
    for c in &first.cells {
        let tag = format!("{}_{}", c.test.as_str(), level_tag(c.level));
        out.push_str(&format!(",{tag},{tag}_hw"));
    }
    out.push('\n');
    for row in rows {
        out.push_str(&row.t.to_string());
        for c in &row.cells {
            let (r, h) = if c.valid { (c.rate, c.half_width) } else { (f64::NAN, f64::NAN) };
            out.push_str(&format!(",{},{}", fmt(r), fmt(h)));
        }
        out.push('\n');
    }
    out
}

/// Long table with every field of every cell.
pub fn accuracy_cells_csv(rows: &[McAccuracy]) -> String {
    let mut out = String::from("T,method,bias,variance_trace,mse,successes,failures,valid\n");
    for row in rows {
        for c in &row.cells {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{}\n",
                row.t,
                c.method.as_str(),
                fmt(c.bias),
                fmt(c.variance_trace),
                fmt(c.mse),
                c.successes,
                c.failures,
                c.valid
            ));
        }
    }
    out
}

pub fn rejection_cells_csv(rows: &[McRejection]) -> String {
    let mut out = String::from("T,test,level,threshold,rate,half_width,successes,failures,valid\n");
    for row in rows {
        for c in &row.cells {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{}\n",
                row.t,
                c.test.as_str(),
                c.level,
                fmt(c.threshold),
                fmt(c.rate),
                fmt(c.half_width),
                c.successes,
                c.failures,
                c.valid
            ));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn welford_matches_two_pass() {
        let xs = [[1.0, -2.0], [3.5, 0.25], [-1.0, 4.0], [2.0, 2.0]];
        let mut w = VecWelford::new(2);
        for x in &xs {
            w.push(x);
        }
        for j in 0..2 {
            let mean = xs.iter().map(|x| x[j]).sum::<f64>() / 4.0;
            let ss = xs.iter().map(|x| (x[j] - mean).powi(2)).sum::<f64>();
            assert!((w.mean[j] - mean).abs() < 1e-14);
            assert!((w.m2[j] - ss).abs() < 1e-12);
        }
    }

    #[test]
    fn half_width_at_five_percent() {
        assert!((binomial_half_width(0.05, 1000) - 0.0135).abs() < 1e-4);
    }

    #[test]
    fn config_validation() {
        let mut c = McConfig::new(Regime::Bd, 2, 1, 50, 1, 0);
        assert!(c.validate().is_ok());
        c.levels = vec![0.05, 1.0];
        assert!(c.validate().is_err());
        c.levels = vec![0.05];
        c.reps = 0;
        assert!(c.validate().is_err());
    }
}
