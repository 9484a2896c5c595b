//! VAR-sieve resampling of the joint `(x, u)` system, the fast double
//! bootstrap Wald test, and bootstrap bias correction of the GD estimator.

use alloc::vec::Vec;

use rand::Rng;

use crate::dgp::{measurement, Panel};
use crate::error::{Error, Result};
use crate::estimators::{fit_var, gd_fit, FitResult, Method};
use crate::inference::{restrict, wald_statistic, BootstrapAux, LinearRestriction, Reference, TestMethod, TestOutcome};
use crate::numerics::{empirical_quantile, spectral_radius, Mat, RngStream};

/// Fitted sieve radius at or above which the lag matrices are shrunk.
pub const STABILITY_LIMIT: f64 = 0.999;
/// Radius after shrinkage.
pub const SHRINK_TARGET: f64 = 0.99;
pub const DEFAULT_BURN_IN: usize = 100;

/// Resampling law: the measurement equation at `kappa_gen` driven by a
/// VAR(p) for `(x_t − μ̂x, û_t)` with i.i.d. draws from centred residual pairs.
#[derive(Clone, Debug, PartialEq)]
pub struct NullGenerator {
    pub kappa_gen: Vec<f64>,
    pub n: usize,
    pub r: usize,
    pub mu_x: Vec<f64>,
    /// Joint lag matrices, `(r+N)×(r+N)`, regressors first.
    pub phi: Vec<Mat>,
    /// Centred joint innovations, one row per period.
    pub pool: Mat,
    /// Factor `γ` applied as `Φ_j ← γ^j Φ_j` when the fitted sieve was unstable.
    pub shrink: Option<f64>,
    pub burn_in: usize,
}

impl NullGenerator {
    pub fn p(&self) -> usize {
        self.phi.len()
    }
}

/// Fits GD on `panel` and builds the generator, restricted when `restr` is
/// given.
pub fn fit_null_generator(panel: &Panel, p: usize, restr: Option<&LinearRestriction>) -> Result<NullGenerator> {
    let fit = gd_fit(panel, p)?;
    generator_from_fit(panel, &fit, restr)
}

/// Builds the generator from an existing GD fit of `panel`.
pub fn generator_from_fit(panel: &Panel, fit: &FitResult, restr: Option<&LinearRestriction>) -> Result<NullGenerator> {
    let stage = fit.stage.as_ref().ok_or_else(|| Error::InvalidParams("generator needs a GD fit with its Durbin stage".into()))?;
    let p = fit.p_used;
    let kappa_gen = match restr {
        Some(rs) => {
            let v = fit.v_hat.as_ref().ok_or(Error::SingularRestriction)?;
            restrict(&fit.kappa_hat, v, rs)?
        }
        None => fit.kappa_hat.clone(),
    };
    let (t, n, r) = (panel.t(), panel.n(), panel.r());
    let m = r + n;
    let zero = alloc::vec![0.0; n];
    let mut z = Mat::zeros(t, m);
    let mut fitted = alloc::vec![0.0; n];
    for s in 0..t {
        let x = panel.x.row(s);
        measurement(&kappa_gen, x, &zero, &mut fitted);
        let row = z.row_mut(s);
        for q in 0..r {
            row[q] = x[q] - stage.mu_x[q];
        }
        for i in 0..n {
            row[r + i] = panel.y[(s, i)] - fitted[i];
        }
    }
    let var = fit_var(&z, p, p)?;
    let mut phi = var.phi;
    let mut pool = var.residuals;
    let means = pool.column_means();
    for s in 0..pool.rows() {
        for (v, mu) in pool.row_mut(s).iter_mut().zip(&means) {
            *v -= mu;
        }
    }
    let rho = spectral_radius(&crate::dgp::companion(&phi))?;
    let mut shrink = None;
    if rho >= STABILITY_LIMIT {
        let g = SHRINK_TARGET / rho;
        log::warn!("fitted sieve has spectral radius {rho:.4}; shrinking lag matrices to radius {SHRINK_TARGET}");
        let mut gj = 1.0;
        for ph in phi.iter_mut() {
            gj *= g;
            ph.scale_mut(gj);
        }
        shrink = Some(g);
    }
    Ok(NullGenerator { kappa_gen, n, r, mu_x: stage.mu_x.clone(), phi, pool, shrink, burn_in: DEFAULT_BURN_IN })
}

/// Draws a pseudo-sample of length `t` from the generator.
pub fn sieve_resample(gen: &NullGenerator, t: usize, stream: RngStream) -> Result<Panel> {
    let pool_len = gen.pool.rows();
    if pool_len == 0 {
        return Err(Error::EmptySample);
    }
    let (n, r, p) = (gen.n, gen.r, gen.p());
    let m = n + r;
    let mut rng = stream.rng();
    let mut hist = alloc::vec![alloc::vec![0.0; m]; p];
    let mut z = alloc::vec![0.0; m];
    let mut y = Mat::zeros(t, n);
    let mut x = Mat::zeros(t, r);
    let mut u = Mat::zeros(t, n);
    for step in 0..(gen.burn_in + t) {
        let idx = rng.random_range(0..pool_len);
        z.copy_from_slice(gen.pool.row(idx));
        for (ph, prev) in gen.phi.iter().zip(&hist) {
            for i in 0..m {
                z[i] += crate::numerics::dot(ph.row(i), prev);
            }
        }
        hist.rotate_right(1);
        hist[0].copy_from_slice(&z);
        if step >= gen.burn_in {
            let s = step - gen.burn_in;
            let xr = x.row_mut(s);
            for q in 0..r {
                xr[q] = gen.mu_x[q] + z[q];
            }
            u.row_mut(s).copy_from_slice(&z[r..]);
            let xs = x.row(s).to_vec();
            measurement(&gen.kappa_gen, &xs, &z[r..], y.row_mut(s));
        }
    }
    Ok(Panel { y, x, u_true: Some(u) })
}

fn gd_wald(panel: &Panel, p: usize, restr: &LinearRestriction) -> Result<(FitResult, f64)> {
    let fit = gd_fit(panel, p)?;
    let w = wald_statistic(&fit.kappa_hat, fit.v_hat.as_ref().expect("GD carries V"), fit.t_eff, restr)?;
    Ok((fit, w))
}

/// One outer/inner FDB draw `(W*_b, W**_b)` using substreams 0 and 1 of
/// `stream`.
pub fn fdb_draw(gen: &NullGenerator, t: usize, p: usize, restr: &LinearRestriction, stream: RngStream) -> Result<(f64, f64)> {
    let outer = sieve_resample(gen, t, stream.substream(0))?;
    let (fit_star, w_star) = gd_wald(&outer, p, restr)?;
    let inner_gen = generator_from_fit(&outer, &fit_star, Some(restr))?;
    let inner = sieve_resample(&inner_gen, t, stream.substream(1))?;
    let (_, w_star_star) = gd_wald(&inner, p, restr)?;
    Ok((w_star, w_star_star))
}

/// FDB p-value from the observed statistic and the successful draws.
pub fn fdb_p_value(w: f64, w_star: &[f64], w_star_star: &[f64]) -> Result<(f64, f64, f64)> {
    let b = w_star.len();
    if b == 0 {
        return Err(Error::EmptySample);
    }
    let p_star = w_star.iter().filter(|&&v| v >= w).count() as f64 / b as f64;
    let q = empirical_quantile(w_star_star, 1.0 - p_star)?;
    let p_fdb = w_star.iter().filter(|&&v| v >= q).count() as f64 / b as f64;
    Ok((p_star, q, p_fdb))
}

/// Substream of `stream` that owns bootstrap replication `b`.
pub fn fdb_stream(stream: RngStream, b: usize) -> RngStream {
    stream.substream(b as u64)
}

/// Collects draws, rejecting the run when more than 10% of them fail.
pub fn fdb_outcome(
    statistic: f64,
    p_used: usize,
    draws: impl IntoIterator<Item = Result<(f64, f64)>>,
) -> Result<TestOutcome> {
    let mut w_star = Vec::new();
    let mut w_star_star = Vec::new();
    let mut failed = 0;
    for d in draws {
        match d {
            Ok((a, b)) => {
                w_star.push(a);
                w_star_star.push(b);
            }
            Err(_) => failed += 1,
        }
    }
    let attempted = failed + w_star.len();
    if failed * 10 > attempted || w_star.is_empty() {
        return Err(Error::BootstrapDegenerate { failed, attempted });
    }
    let (p_star, q_star_star, p_fdb) = fdb_p_value(statistic, &w_star, &w_star_star)?;
    Ok(TestOutcome {
        method: TestMethod::Fdb,
        statistic,
        reference: Reference::Bootstrap { b1: attempted },
        p_value: p_fdb,
        p_used: Some(p_used),
        bootstrap: Some(BootstrapAux { p_star, q_star_star, failed, w_star, w_star_star }),
    })
}

/// Observed GD Wald statistic and the restricted generator for an FDB run.
pub fn fdb_setup(panel: &Panel, restr: &LinearRestriction, p: usize) -> Result<(f64, NullGenerator)> {
    let (fit, w) = gd_wald(panel, p, restr)?;
    let gen = generator_from_fit(panel, &fit, Some(restr))?;
    Ok((w, gen))
}

/// Fast double bootstrap GD-Wald test with `b1` outer replications, run
/// sequentially.
pub fn fdb_test(panel: &Panel, restr: &LinearRestriction, p: usize, b1: usize, stream: RngStream) -> Result<TestOutcome> {
    if b1 == 0 {
        return Err(Error::InvalidParams("b1 must be positive".into()));
    }
    let (w, gen) = fdb_setup(panel, restr, p)?;
    let t = panel.t();
    fdb_outcome(w, p, (0..b1).map(|b| fdb_draw(&gen, t, p, restr, fdb_stream(stream, b))))
}

/// `2κ̂ − mean_b κ̂*_b` over `b_reps` resamples from the unrestricted
/// generator; failed resamples are redrawn up to three times the budget.
pub fn bias_correct(panel: &Panel, p: usize, b_reps: usize, stream: RngStream) -> Result<(FitResult, Vec<f64>)> {
    let fit = gd_fit(panel, p)?;
    let gen = generator_from_fit(panel, &fit, None)?;
    let corrected = bias_correct_with(&fit, &gen, panel.t(), b_reps, stream)?;
    Ok((fit, corrected))
}

pub fn bias_correct_with(fit: &FitResult, gen: &NullGenerator, t: usize, b_reps: usize, stream: RngStream) -> Result<Vec<f64>> {
    if b_reps == 0 {
        return Err(Error::InvalidParams("bootstrap budget must be positive".into()));
    }
    let k = fit.kappa_hat.len();
    let mut sum = alloc::vec![0.0; k];
    let mut ok = 0;
    let mut attempted = 0;
    while ok < b_reps {
        if attempted >= 3 * b_reps {
            return Err(Error::BootstrapDegenerate { failed: attempted - ok, attempted });
        }
        let draw = sieve_resample(gen, t, stream.substream(attempted as u64)).and_then(|pn| gd_fit(&pn, fit.p_used));
        attempted += 1;
        if let Ok(f) = draw {
            for (s, v) in sum.iter_mut().zip(&f.kappa_hat) {
                *s += v;
            }
            ok += 1;
        }
    }
    Ok(fit.kappa_hat.iter().zip(sum).map(|(k, s)| 2.0 * k - s / ok as f64).collect())
}

/// Minimum bias-correction budget accepted by [`bc_gd_fit`].
pub const MIN_BIAS_REPS: usize = 50;

/// GD with bootstrap bias correction; `V̂` is the GD one.
pub fn bc_gd_fit(panel: &Panel, p: usize, b_reps: usize, stream: RngStream) -> Result<FitResult> {
    if b_reps < MIN_BIAS_REPS {
        return Err(Error::InvalidParams(alloc::format!("bias correction needs at least {MIN_BIAS_REPS} resamples")));
    }
    let (mut fit, corrected) = bias_correct(panel, p, b_reps, stream)?;
    fit.kappa_hat = corrected;
    fit.method = Method::BcGd;
    Ok(fit)
}
