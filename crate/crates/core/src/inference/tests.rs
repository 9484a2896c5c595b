use alloc::vec;
use alloc::vec::Vec;

use super::*;
use crate::dgp::{build_block_var, simulate, DesignConfig, Panel, Regime, SystemParams};
use crate::estimators::{gd_fit, Method};
use crate::numerics::{solve_general, std_normal, symmetric_eigenvalues, RngStream};

fn scalar_fit(kappa: f64, v: f64, t_eff: usize) -> FitResult {
    FitResult {
        method: Method::Gd,
        kappa_hat: vec![kappa],
        v_hat: Some(Mat::diag(&[v])),
        sigma_uu_hat: Mat::identity(1),
        p_used: 1,
        t_eff,
        residuals: Mat::zeros(0, 1),
        n: 1,
        r: 0,
        stage: None,
    }
}

fn random_fixture(seed: u64, m: usize, q: usize) -> (Vec<f64>, Mat, LinearRestriction) {
    let mut rng = RngStream::new(seed, 77).rng();
    let g = Mat::from_fn(m, m, |_, _| std_normal(&mut rng));
    let v = g.matmul_t(&g).add(&Mat::identity(m).scale(0.1));
    let kappa: Vec<f64> = (0..m).map(|_| std_normal(&mut rng)).collect();
    let r_mat = Mat::from_fn(q, m, |_, _| std_normal(&mut rng));
    let r_vec: Vec<f64> = (0..q).map(|_| std_normal(&mut rng)).collect();
    (kappa, v, LinearRestriction::new(r_mat, r_vec).unwrap())
}

#[test]
fn wald_scalar_arithmetic() {
    let restr = LinearRestriction::new(Mat::identity(1), vec![0.0]).unwrap();
    let out = wald(&scalar_fit(0.2, 1.0, 100), &restr).unwrap();
    assert!((out.statistic - 4.0).abs() < 1e-12);
    assert!((out.p_value - 0.045_500_263_896_358_4).abs() < 1e-10);
    let zero = wald(&scalar_fit(0.0, 1.0, 100), &restr).unwrap();
    assert_eq!(zero.statistic, 0.0);
    assert_eq!(zero.p_value, 1.0);
}

#[test]
fn wald_invariant_to_reparameterized_restrictions() {
    let (kappa, v, restr) = random_fixture(3, 6, 3);
    let w = wald_statistic(&kappa, &v, 250, &restr).unwrap();
    let mut rng = RngStream::new(4, 0).rng();
    let a = Mat::from_fn(3, 3, |_, _| std_normal(&mut rng)).add(&Mat::identity(3).scale(3.0));
    let restr2 = LinearRestriction::new(a.matmul(&restr.r_mat), a.matvec(&restr.r_vec)).unwrap();
    let w2 = wald_statistic(&kappa, &v, 250, &restr2).unwrap();
    assert!((w - w2).abs() < 1e-8 * w.max(1.0));
}

#[test]
fn singular_restriction_is_reported() {
    let r_mat = Mat::from_rows(&[&[1.0, 0.0], &[2.0, 0.0]]);
    let restr = LinearRestriction::new(r_mat, vec![0.0, 0.0]).unwrap();
    assert_eq!(wald_statistic(&[1.0, 1.0], &Mat::identity(2), 10, &restr), Err(Error::SingularRestriction));
}

#[test]
fn restricted_estimate_satisfies_and_minimizes() {
    for seed in 0..100 {
        let (kappa, v, restr) = random_fixture(seed, 5, 2);
        let kt = restrict(&kappa, &v, &restr).unwrap();
        for d in restr.discrepancy(&kt) {
            assert!(d.abs() < 1e-10);
        }
        // KKT system [[V⁻¹, Rᵀ], [R, 0]] [κ; λ] = [V⁻¹ κ̂; r]
        let m = 5;
        let vinv = crate::numerics::inverse_spd(&v).unwrap();
        let mut kkt = Mat::zeros(m + 2, m + 2);
        kkt.set_block(0, 0, &vinv);
        kkt.set_block(0, m, &restr.r_mat.transpose());
        kkt.set_block(m, 0, &restr.r_mat);
        let mut rhs = vinv.matvec(&kappa);
        rhs.extend_from_slice(&restr.r_vec);
        let sol = solve_general(&kkt, &rhs).unwrap();
        for (a, b) in kt.iter().zip(&sol[..m]) {
            assert!((a - b).abs() < 1e-8 * (1.0 + b.abs()));
        }
        let again = restrict(&kt, &v, &restr).unwrap();
        for (a, b) in kt.iter().zip(&again) {
            assert!((a - b).abs() < 1e-12 * (1.0 + b.abs()));
        }
    }
    let (kappa, v, _) = random_fixture(1, 4, 4);
    let all = LinearRestriction::new(Mat::identity(4), vec![0.0; 4]).unwrap();
    for x in restrict(&kappa, &v, &all).unwrap() {
        assert!(x.abs() < 1e-12);
    }
}

fn bd_panel(t: usize, n: usize, r: usize, seed: u64) -> Panel {
    let spec = build_block_var(&DesignConfig::baseline(Regime::Bd, r, n), RngStream::new(seed, 0)).unwrap();
    simulate(&spec, &SystemParams::null(n, r), t, 200, RngStream::new(seed, 1)).unwrap()
}

#[test]
fn grs_zero_when_intercepts_vanish() {
    let mut panel = bd_panel(50, 3, 2, 1);
    let a = crate::estimators::ols_fit(&panel).unwrap().alpha().to_vec();
    for s in 0..50 {
        for i in 0..3 {
            panel.y[(s, i)] -= a[i];
        }
    }
    let out = grs_test(&panel).unwrap();
    assert!(out.statistic.abs() < 1e-20);
    assert!((out.p_value - 1.0).abs() < 1e-12);
}

#[test]
fn grs_matches_scalar_formula() {
    // N = 2, k = 1, T = 10 evaluated with explicit 2×2 algebra
    let x: Vec<f64> = vec![0.5, -0.2, 1.1, 0.3, -0.7, 0.9, 0.0, 0.4, -0.1, 0.6];
    let y1: Vec<f64> = vec![0.6, -0.1, 1.3, 0.2, -0.5, 1.2, 0.2, 0.3, 0.1, 0.9];
    let y2: Vec<f64> = vec![0.1, 0.0, 0.5, 0.4, -0.4, 0.2, 0.3, 0.1, -0.2, 0.5];
    let t = 10.0;
    let xm = x.iter().sum::<f64>() / t;
    let sxx: f64 = x.iter().map(|v| (v - xm) * (v - xm)).sum();
    let fit1 = |y: &[f64]| {
        let ym = y.iter().sum::<f64>() / t;
        let b = x.iter().zip(y).map(|(a, c)| (a - xm) * (c - ym)).sum::<f64>() / sxx;
        let a = ym - b * xm;
        let e: Vec<f64> = x.iter().zip(y).map(|(xv, yv)| yv - a - b * xv).collect();
        (a, e)
    };
    let (a1, e1) = fit1(&y1);
    let (a2, e2) = fit1(&y2);
    let dof = t - 2.0;
    let s11 = e1.iter().map(|v| v * v).sum::<f64>() / dof;
    let s22 = e2.iter().map(|v| v * v).sum::<f64>() / dof;
    let s12 = e1.iter().zip(&e2).map(|(a, b)| a * b).sum::<f64>() / dof;
    let det = s11 * s22 - s12 * s12;
    let quad = (a1 * a1 * s22 - 2.0 * a1 * a2 * s12 + a2 * a2 * s11) / det;
    let sx = sxx / (t - 1.0);
    let expected = t * (t - 3.0) / (2.0 * (t - 2.0)) * quad / (1.0 + xm * xm / sx);

    let y = Mat::from_fn(10, 2, |s, i| if i == 0 { y1[s] } else { y2[s] });
    let panel = Panel::new(y, Mat::column(&x)).unwrap();
    let out = grs_test(&panel).unwrap();
    assert!((out.statistic - expected).abs() < 1e-10 * expected.max(1.0));
    assert_eq!(out.reference, Reference::F { d1: 2, d2: 7 });
}

#[test]
fn grs_invariant_to_relabeling() {
    let panel = bd_panel(80, 4, 2, 5);
    let perm = [2usize, 0, 3, 1];
    let y = Mat::from_fn(80, 4, |s, i| panel.y[(s, perm[i])]);
    let permuted = Panel::new(y, panel.x.clone()).unwrap();
    let a = grs_test(&panel).unwrap().statistic;
    let b = grs_test(&permuted).unwrap().statistic;
    assert!((a - b).abs() < 1e-10 * a);
}

#[test]
fn qs_kernel_normalization_and_continuity() {
    assert_eq!(qs_kernel(0.0), 1.0);
    assert!((qs_kernel(1e-6) - 1.0).abs() < 1e-9);
    assert!((qs_kernel(1e-3) - qs_kernel(-1e-3)).abs() < 1e-15);
    // the series branch and the closed form agree at the switch
    let pi = core::f64::consts::PI;
    let closed = |x: f64| {
        let z = 6.0 * pi * x / 5.0;
        25.0 / (12.0 * pi * pi * x * x) * (z.sin() / z - z.cos())
    };
    let x = 0.099 * 5.0 / (6.0 * pi);
    assert!((qs_kernel(x) - closed(x)).abs() < 1e-12);
    assert!(qs_kernel(5.0).abs() < 0.02);
}

#[test]
fn long_run_covariance_is_symmetric_psd() {
    let mut rng = RngStream::new(11, 0).rng();
    let mut v = Mat::zeros(300, 3);
    for s in 1..300 {
        for i in 0..3 {
            v[(s, i)] = 0.6 * v[(s - 1, i)] + std_normal(&mut rng) + if i > 0 { 0.3 * v[(s, 0)] } else { 0.0 };
        }
    }
    for bw in [0.5, 10.0, 90.0, 300.0] {
        let om = qs_long_run_covariance(&v, bw);
        assert_eq!(om.asymmetry(), 0.0);
        let ev = symmetric_eigenvalues(&om).unwrap();
        assert!(ev[0] >= -1e-8 * om.norm_max(), "bw={bw}, {ev:?}");
    }
}

#[test]
fn small_b_har_is_close_to_white_wald() {
    let panel = bd_panel(2000, 3, 1, 8);
    // white-noise scores: drop the serial dependence by using the true innovations
    let spec = crate::dgp::BlockVarSpec {
        psi: vec![crate::dgp::PsiBlocks::zeros(1, 3)],
        sigma_xx: Mat::identity(1),
        sigma_uu: Mat::identity(3),
        mu_x: vec![0.2],
        regime: Regime::Bd,
    };
    let panel = simulate(&spec, &SystemParams::alternative(3, 1, 0.05), panel.t(), 0, RngStream::new(8, 2)).unwrap();
    let restr = LinearRestriction::alpha_zero(3, 1);
    let har = har_statistic(&panel, &restr, 1e-4).unwrap().statistic;
    // heteroskedasticity-robust Wald by direct assembly
    let sol = crate::estimators::gls::solve_filtered(&panel, &crate::estimators::Filter::identity(3, 1), 0).unwrap();
    let t = panel.t() as f64;
    let rq = restr.r_mat.matmul(&sol.h_inv).scale(t);
    let mut meat = Mat::zeros(3, 3);
    for s in 0..panel.t() {
        let u = sol.residuals.row(s);
        let x = panel.x[(s, 0)];
        let v: Vec<f64> = u.iter().copied().chain(u.iter().map(|ui| ui * x)).collect();
        let g = rq.matvec(&v);
        for i in 0..3 {
            for j in 0..3 {
                meat[(i, j)] += g[i] * g[j] / t;
            }
        }
    }
    let d = restr.discrepancy(&sol.kappa);
    let white = t * crate::numerics::dot(&d, &crate::numerics::solve_spd(&meat, &Mat::column(&d)).unwrap().into_vec());
    assert!((har - white).abs() < 0.1 * white, "{har} vs {white}");
}

#[test]
fn fixed_b_table_basics() {
    let a = FixedBTable::simulate(0.5, 2, 200, 2000, 9).unwrap();
    let b = FixedBTable::simulate(0.5, 2, 200, 2000, 9).unwrap();
    assert_eq!(a, b);
    assert!(a.draws.windows(2).all(|w| w[0] <= w[1]));
    assert_eq!(a.p_value(-1.0), 1.0);
    assert_eq!(a.p_value(f64::INFINITY), 0.0);
    let c = a.critical_value(0.05);
    assert!((a.p_value(c) - 0.05).abs() < 0.002);
}

#[test]
fn har_outcome_uses_table() {
    let panel = bd_panel(200, 2, 1, 3);
    let restr = LinearRestriction::alpha_zero(2, 1);
    let table = FixedBTable::simulate(0.1, 2, 200, 1000, 1).unwrap();
    let out = har_fixed_b_test(&panel, &restr, &table).unwrap();
    assert_eq!(out.reference, Reference::FixedB { b: 0.1, q: 2 });
    assert!((0.0..=1.0).contains(&out.p_value));
    let wrong = FixedBTable::simulate(0.1, 3, 200, 10, 1).unwrap();
    assert!(har_fixed_b_test(&panel, &restr, &wrong).is_err());
}

#[test]
fn gd_wald_on_alpha_zero() {
    let panel = bd_panel(400, 3, 2, 12);
    let fit = gd_fit(&panel, 1).unwrap();
    let out = wald(&fit, &LinearRestriction::alpha_zero(3, 2)).unwrap();
    assert_eq!(out.reference, Reference::Chi2 { q: 3 });
    assert_eq!(out.method, TestMethod::WaldGd);
    assert!(out.statistic >= 0.0);
}
