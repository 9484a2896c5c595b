use gdsur_core::inference::{kernel_eigenvalues, FixedBTable};
use gdsur_core::numerics::{dist_sf, Dist};

/// Upper-tail quantile by bisection.
fn quantile(dist: Dist, level: f64) -> f64 {
    let (mut lo, mut hi) = (0.0, 200.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if dist_sf(dist, mid).unwrap() > level {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[test]
fn tiny_bandwidth_recovers_chi_square() {
    for q in [1, 2] {
        let table = FixedBTable::simulate(0.005, q, 1000, 50_000, 11).unwrap();
        for level in [0.10, 0.05] {
            let cv = table.critical_value(level);
            let chi = quantile(Dist::Chi2 { df: q as f64 }, level);
            assert!((cv / chi - 1.0).abs() < 0.03, "q={q} level={level}: {cv} vs {chi}");
        }
    }
}

// With many restrictions the small-b law is a Hotelling T², which sits
// visibly above χ²_q; the two-moment match of the weighted sum pins it.
#[test]
fn tiny_bandwidth_with_five_restrictions_is_hotelling() {
    let (b, n, q) = (0.005, 1000, 5usize);
    let lambda = kernel_eigenvalues(b, n).unwrap();
    let mean = lambda.iter().sum::<f64>() / n as f64;
    let nu = mean * mean / (lambda.iter().map(|l| l * l).sum::<f64>() / (n * n) as f64);
    let table = FixedBTable::from_eigenvalues(&lambda, b, q, n, 50_000, 11).unwrap();
    let qf = q as f64;
    for level in [0.10, 0.05] {
        let f = quantile(Dist::F { d1: qf, d2: nu - qf + 1.0 }, level);
        let hotelling = qf * nu / (nu - qf + 1.0) * f / mean;
        let cv = table.critical_value(level);
        assert!((cv / hotelling - 1.0).abs() < 0.015, "level {level}: {cv} vs {hotelling}");
    }
}

#[test]
fn full_bandwidth_fattens_the_tail() {
    let table = FixedBTable::simulate(1.0, 1, 1000, 50_000, 12).unwrap();
    assert!(table.critical_value(0.05) > 3.841);
}

#[test]
fn tables_are_reproducible() {
    let a = FixedBTable::simulate(0.1, 3, 500, 5000, 13).unwrap();
    let b = FixedBTable::simulate(0.1, 3, 500, 5000, 13).unwrap();
    assert_eq!(a, b);
    let c = FixedBTable::simulate(0.1, 3, 500, 5000, 14).unwrap();
    assert_ne!(a.draws, c.draws);
}
