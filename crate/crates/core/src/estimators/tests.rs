use alloc::vec;
use alloc::vec::Vec;

use super::*;
use crate::dgp::{build_block_var, simulate, DesignConfig, Regime, SystemParams};
use crate::numerics::{solve_general, RngStream};

fn fixture(regime: Regime, t: usize, seed: u64) -> Panel {
    let spec = build_block_var(&DesignConfig::baseline(regime, 1, 2), RngStream::new(seed, 0)).unwrap();
    let params = SystemParams { n: 2, r: 1, alpha: vec![0.3, -0.2], beta: vec![1.0, 0.5] };
    simulate(&spec, &params, t, 100, RngStream::new(seed, 1)).unwrap()
}

fn lstsq(x: &Mat, y: &[f64]) -> Vec<f64> {
    let xtx = x.t_matmul(x);
    solve_general(&xtx, &x.t_matvec(y)).unwrap()
}

fn inverse(a: &Mat) -> Mat {
    let n = a.rows();
    let mut out = Mat::zeros(n, n);
    for j in 0..n {
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        for (i, v) in solve_general(a, &e).unwrap().into_iter().enumerate() {
            out[(i, j)] = v;
        }
    }
    out
}

// Z_tᵀ = [I_N, I_N ⊗ x_tᵀ]
fn z_t(n: usize, x: &[f64]) -> Mat {
    let r = x.len();
    let mut z = Mat::zeros(n, n * (1 + r));
    for i in 0..n {
        z[(i, i)] = 1.0;
        for q in 0..r {
            z[(i, n + i * r + q)] = x[q];
        }
    }
    z
}

fn gls_brute(ys: &[Vec<f64>], zs: &[Mat], sigma: &Mat) -> Vec<f64> {
    let s = inverse(sigma);
    let k = zs[0].cols();
    let mut h = Mat::zeros(k, k);
    let mut c = vec![0.0; k];
    for (y, z) in ys.iter().zip(zs) {
        h.add_assign(&z.t_matmul(&s).matmul(z));
        for (ci, v) in c.iter_mut().zip(z.t_matmul(&s).matvec(y)) {
            *ci += v;
        }
    }
    solve_general(&h, &c).unwrap()
}

fn quasi_difference(panel: &Panel, psi: &[Mat], psi_ux: &[Mat], mu: &[f64], start: usize) -> (Vec<Vec<f64>>, Vec<Mat>) {
    let n = panel.n();
    let mut ys = Vec::new();
    let mut zs = Vec::new();
    for s in start..panel.t() {
        let mut y = panel.y.row(s).to_vec();
        let mut z = z_t(n, panel.x.row(s));
        for (j, ps) in psi.iter().enumerate() {
            let py = ps.matvec(panel.y.row(s - 1 - j));
            let pz = ps.matmul(&z_t(n, panel.x.row(s - 1 - j)));
            for i in 0..n {
                y[i] -= py[i];
            }
            z.sub_assign(&pz);
        }
        for (j, pux) in psi_ux.iter().enumerate() {
            let xc: Vec<f64> = panel.x.row(s - 1 - j).iter().zip(mu).map(|(a, b)| a - b).collect();
            let v = pux.matvec(&xc);
            for i in 0..n {
                y[i] -= v[i];
            }
        }
        ys.push(y);
        zs.push(z);
    }
    (ys, zs)
}

fn assert_close(a: &[f64], b: &[f64], tol: f64) {
    assert_eq!(a.len(), b.len());
    for (x, y) in a.iter().zip(b) {
        assert!((x - y).abs() <= tol, "{a:?} vs {b:?}");
    }
}

fn brute_durbin(panel: &Panel, p: usize) -> (Vec<Mat>, Vec<Mat>, Mat, Vec<f64>, Mat) {
    let (t, n, r) = (panel.t(), panel.n(), panel.r());
    let d = durbin_width(n, r, p);
    let w = Mat::from_fn(t - p, d, |row, col| {
        let s = row + p;
        if col == 0 {
            return 1.0;
        }
        let col = col - 1;
        if col < r {
            return panel.x[(s, col)];
        }
        let col = col - r;
        if col < p * n {
            return panel.y[(s - 1 - col / n, col % n)];
        }
        let col = col - p * n;
        panel.x[(s - 1 - col / r, col % r)]
    });
    let mut theta = Mat::zeros(n, d);
    let mut resid = Mat::zeros(t - p, n);
    for i in 0..n {
        let y: Vec<f64> = (p..t).map(|s| panel.y[(s, i)]).collect();
        let th = lstsq(&w, &y);
        let fitted = w.matvec(&th);
        for s in 0..t - p {
            resid[(s, i)] = y[s] - fitted[s];
        }
        theta.row_mut(i).copy_from_slice(&th);
    }
    let b = theta.block(0, 1, n, r);
    let psi_uu: Vec<Mat> = (0..p).map(|j| theta.block(0, 1 + r + j * n, n, n)).collect();
    let psi_ux: Vec<Mat> =
        (0..p).map(|j| theta.block(0, 1 + r + p * n + j * r, n, r).add(&psi_uu[j].matmul(&b))).collect();
    let sigma = resid.t_matmul(&resid).scale(1.0 / (t - p) as f64);
    let mu = panel.x.slice_rows(p, t).column_means();
    (psi_uu, psi_ux, sigma, mu, theta)
}

#[test]
fn ols_matches_normal_equations() {
    let panel = fixture(Regime::Ebd, 12, 1);
    let (ys, zs) = quasi_difference(&panel, &[], &[], &[0.0], 0);
    let oracle = gls_brute(&ys, &zs, &Mat::identity(2));
    let fit = ols_fit(&panel).unwrap();
    assert_close(&fit.kappa_hat, &oracle, 1e-10);
    assert!(fit.v_hat.is_none());
}

#[test]
fn durbin_matches_per_equation_least_squares() {
    let panel = fixture(Regime::Ebd, 12, 2);
    let st = durbin_stage(&panel, 1).unwrap();
    let (psi_uu, psi_ux, sigma, mu, theta) = brute_durbin(&panel, 1);
    assert!(st.theta.sub(&theta).norm_max() < 1e-10);
    assert!(st.psi_uu[0].sub(&psi_uu[0]).norm_max() < 1e-10);
    assert!(st.psi_ux[0].sub(&psi_ux[0]).norm_max() < 1e-10);
    assert!(st.sigma_uu.sub(&sigma).norm_max() < 1e-10);
    assert_close(&st.mu_x, &mu, 1e-14);
}

#[test]
fn gd_and_fglsd_match_brute_force() {
    let panel = fixture(Regime::Ebd, 12, 3);
    let (psi_uu, psi_ux, sigma, mu, _) = brute_durbin(&panel, 1);
    let (ys, zs) = quasi_difference(&panel, &psi_uu, &psi_ux, &mu, 1);
    assert_close(&gd_fit(&panel, 1).unwrap().kappa_hat, &gls_brute(&ys, &zs, &sigma), 1e-10);
    let (ys, zs) = quasi_difference(&panel, &psi_uu, &[], &mu, 1);
    assert_close(&fglsd_fit(&panel, 1).unwrap().kappa_hat, &gls_brute(&ys, &zs, &sigma), 1e-10);
}

#[test]
fn fgls_co_matches_brute_force() {
    let panel = fixture(Regime::Gexog, 12, 4);
    let (ys, zs) = quasi_difference(&panel, &[], &[], &[0.0], 0);
    let k_ols = gls_brute(&ys, &zs, &Mat::identity(2));
    let u: Vec<Vec<f64>> = ys.iter().zip(&zs).map(|(y, z)| {
        let f = z.matvec(&k_ols);
        y.iter().zip(f).map(|(a, b)| a - b).collect()
    }).collect();
    // VAR(1) without intercept, equation by equation
    let lagged = Mat::from_fn(11, 2, |s, c| u[s][c]);
    let mut phi = Mat::zeros(2, 2);
    for i in 0..2 {
        let y: Vec<f64> = (1..12).map(|s| u[s][i]).collect();
        phi.row_mut(i).copy_from_slice(&lstsq(&lagged, &y));
    }
    let mut sigma = Mat::zeros(2, 2);
    for s in 1..12 {
        let e: Vec<f64> = (0..2).map(|i| u[s][i] - crate::numerics::dot(phi.row(i), &u[s - 1])).collect();
        for a in 0..2 {
            for b in 0..2 {
                sigma[(a, b)] += e[a] * e[b] / 11.0;
            }
        }
    }
    let (ys, zs) = quasi_difference(&panel, &[phi], &[], &[0.0], 1);
    let fit = fgls_co_fit(&panel, 1).unwrap();
    assert_close(&fit.kappa_hat, &gls_brute(&ys, &zs, &sigma), 1e-10);
    let v = fit.v_hat.unwrap();
    let mut h = Mat::zeros(4, 4);
    let s_inv = inverse(&sigma);
    for z in &zs {
        h.add_assign(&z.t_matmul(&s_inv).matmul(z));
    }
    assert!(v.sub(&inverse(&h.scale(1.0 / 11.0))).norm_max() < 1e-8);
}

#[test]
fn noiseless_system_is_recovered_exactly() {
    let mut panel = fixture(Regime::Bd, 40, 5);
    let kappa = [0.3, -0.2, 1.0, 0.5];
    for s in 0..40 {
        let x = panel.x.row(s).to_vec();
        crate::dgp::measurement(&kappa, &x, &[0.0, 0.0], panel.y.row_mut(s));
    }
    assert_close(&ols_fit(&panel).unwrap().kappa_hat, &kappa, 1e-10);
}

#[test]
fn intercept_only_ols_is_the_mean() {
    let panel = fixture(Regime::Bd, 30, 6);
    let y0 = Panel::new(panel.y.clone(), Mat::zeros(30, 0)).unwrap();
    let fit = ols_fit(&y0).unwrap();
    assert_close(&fit.kappa_hat, &panel.y.column_means(), 1e-12);
}

#[test]
fn zero_nuisance_reduces_to_ols() {
    let panel = fixture(Regime::Ebd, 60, 7);
    let trimmed = Panel::new(panel.y.slice_rows(1, 60), panel.x.slice_rows(1, 60)).unwrap();
    let ols = ols_fit(&trimmed).unwrap();

    let mut st = durbin_stage(&panel, 1).unwrap();
    st.psi_uu = vec![Mat::zeros(2, 2)];
    st.psi_ux = vec![Mat::zeros(2, 1)];
    st.sigma_uu = Mat::identity(2);
    assert_close(&gd_from_stage(&panel, st.clone()).unwrap().kappa_hat, &ols.kappa_hat, 1e-10);
    assert_close(&fglsd_from_stage(&panel, st).unwrap().kappa_hat, &ols.kappa_hat, 1e-10);
    let f = Filter { psi: vec![Mat::zeros(2, 2)], psi_ux: vec![], mu_x: vec![0.0], sigma: Mat::identity(2) };
    assert_close(&filtered_gls(&panel, &f, 1, Method::FglsCo).unwrap().kappa_hat, &ols.kappa_hat, 1e-10);
}

#[test]
fn bic_prefers_smaller_lag_on_ties() {
    // white noise: log det nearly flat, penalty increasing
    let spec = crate::dgp::BlockVarSpec {
        psi: vec![crate::dgp::PsiBlocks::zeros(1, 2)],
        sigma_xx: Mat::identity(1),
        sigma_uu: Mat::identity(2),
        mu_x: vec![0.0],
        regime: Regime::Bd,
    };
    let panel = simulate(&spec, &SystemParams::null(2, 1), 500, 0, RngStream::new(1, 1)).unwrap();
    assert_eq!(select_lag_bic(&panel, 4).unwrap(), 1);
    let v = bic_values(&panel, 3).unwrap();
    assert_eq!(v.len(), 3);
    assert_eq!(bic_param_count(5, 2, 1), 5 + 10 + 25 + 10);
}

#[test]
fn method_names_roundtrip() {
    for m in Method::ALL {
        assert_eq!(Method::parse(m.as_str()), Some(m));
    }
    assert_eq!(Method::parse("nope"), None);
}
