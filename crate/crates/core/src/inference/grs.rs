use super::{Reference, TestMethod, TestOutcome};
use crate::dgp::Panel;
use crate::error::{Error, Result};
use crate::estimators::ols_fit;
use crate::numerics::{dist_sf, Cholesky, Dist, Mat};

/// Gibbons–Ross–Shanken F test of `α = 0`, with `S_x` on `T−1` and `Σ̂` on
/// `T−k−1` degrees of freedom.
pub fn grs_test(panel: &Panel) -> Result<TestOutcome> {
    let (t, n, k) = (panel.t(), panel.n(), panel.r());
    if t <= n + k + 1 {
        return Err(Error::InsufficientSample { needed: n + k + 1, got: t });
    }
    let fit = ols_fit(panel)?;
    let alpha = fit.alpha().to_vec();
    let sigma = fit.residuals.t_matmul(&fit.residuals).scale(1.0 / (t - k - 1) as f64).symmetrize();
    let xbar = panel.x.column_means();
    let mut sx = Mat::zeros(k, k);
    for s in 0..t {
        for a in 0..k {
            for b in 0..k {
                sx[(a, b)] += (panel.x[(s, a)] - xbar[a]) * (panel.x[(s, b)] - xbar[b]);
            }
        }
    }
    let sx = sx.scale(1.0 / (t - 1) as f64);
    let sharpe = if k > 0 { crate::numerics::dot(&xbar, &Cholesky::new(&sx)?.solve_vec(&xbar)) } else { 0.0 };
    let quad = crate::numerics::dot(&alpha, &Cholesky::new(&sigma)?.solve_vec(&alpha));
    let (tf, nf, kf) = (t as f64, n as f64, k as f64);
    let stat = tf * (tf - nf - kf) / (nf * (tf - kf - 1.0)) * quad / (1.0 + sharpe);
    let d2 = t - n - k;
    Ok(TestOutcome {
        method: TestMethod::Grs,
        statistic: stat,
        reference: Reference::F { d1: n, d2 },
        p_value: dist_sf(Dist::F { d1: n as f64, d2: d2 as f64 }, stat)?,
        p_used: None,
        bootstrap: None,
    })
}
