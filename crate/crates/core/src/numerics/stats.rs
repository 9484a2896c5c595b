//! Order statistics and distribution-free summaries.

#[allow(unused_imports)] // inherent float methods shadow it when std is linked
use num_traits::Float;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// The `⌈τ·n⌉`-th order statistic (1-based, clamped to `[1, n]`).
///
/// This ceiling rule, without interpolation, is the quantile convention used
/// throughout the crate.
pub fn empirical_quantile(v: &[f64], tau: f64) -> Result<f64> {
    if v.is_empty() {
        return Err(Error::EmptySample);
    }
    if !(0.0..=1.0).contains(&tau) {
        return Err(Error::InvalidParams(alloc::format!("quantile level {tau} outside [0, 1]")));
    }
    let mut s: Vec<f64> = v.to_vec();
    s.sort_by(f64::total_cmp);
    Ok(quantile_sorted(&s, tau))
}

/// [`empirical_quantile`] on data already sorted ascending.
pub fn quantile_sorted(sorted: &[f64], tau: f64) -> f64 {
    let n = sorted.len();
    let k = ((tau * n as f64).ceil() as usize).clamp(1, n);
    sorted[k - 1]
}

pub fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// Kolmogorov–Smirnov distance between the empirical law of `sample` and a
/// continuous CDF.
pub fn ks_distance(sample: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut s: Vec<f64> = sample.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in s.iter().enumerate() {
        let f = cdf(x);
        d = d.max((i as f64 + 1.0) / n - f).max(f - i as f64 / n);
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::rng::RngStream;
    use alloc::vec;
    use rand::Rng;

    #[test]
    fn ceiling_rule() {
        let v: Vec<f64> = (1..=10).rev().map(f64::from).collect();
        assert_eq!(empirical_quantile(&v, 1.0).unwrap(), 10.0);
        assert_eq!(empirical_quantile(&v, 0.25).unwrap(), 3.0);
        assert_eq!(empirical_quantile(&v, 0.0).unwrap(), 1.0);
        assert_eq!(empirical_quantile(&v, 0.3).unwrap(), 3.0);
        assert_eq!(empirical_quantile(&[], 0.5), Err(Error::EmptySample));
        assert!(empirical_quantile(&v, 1.5).is_err());
    }

    #[test]
    fn exponential_median() {
        let mut rng = RngStream::new(99, 0).rng();
        let v: Vec<f64> = (0..10_000).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
        let med = empirical_quantile(&v, 0.5).unwrap();
        assert!((med - core::f64::consts::LN_2).abs() < 0.03, "{med}");
    }

    #[test]
    fn ks_of_uniform_grid() {
        let v = vec![0.125, 0.375, 0.625, 0.875];
        assert!((ks_distance(&v, |x| x) - 0.125).abs() < 1e-15);
    }
}
