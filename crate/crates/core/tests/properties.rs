use gdsur_core::dgp::{build_block_var, DesignConfig, Panel, Regime};
use gdsur_core::inference::{grs_test, restrict, wald_statistic, LinearRestriction};
use gdsur_core::numerics::{empirical_quantile, solve_general, solve_spd, Mat};
use gdsur_core::RngStream;
use proptest::prelude::*;

/// A positive definite `m×m` matrix and a full-rank `q×m` restriction.
fn fixture() -> impl Strategy<Value = (Vec<f64>, Mat, Mat, Vec<f64>)> {
    (2usize..7).prop_flat_map(|m| {
        (1..=m).prop_flat_map(move |q| {
            (
                prop::collection::vec(-3.0..3.0f64, m),
                prop::collection::vec(-1.0..1.0f64, m * m),
                prop::collection::vec(-2.0..2.0f64, q * m),
                prop::collection::vec(-2.0..2.0f64, q),
            )
                .prop_map(move |(kappa, g, r, rv)| {
                    let g = Mat::from_vec(m, m, g).unwrap();
                    let v = g.matmul_t(&g).add(&Mat::identity(m).scale(0.5));
                    let mut r_mat = Mat::from_vec(q, m, r).unwrap();
                    // diagonal dominance keeps R of full row rank
                    for i in 0..q {
                        r_mat[(i, i)] += 5.0;
                    }
                    (kappa, v, r_mat, rv)
                })
        })
    })
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |a, x| a.max(x.abs()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn restriction_is_feasible_idempotent_and_optimal((kappa, v, r_mat, r_vec) in fixture()) {
        let (m, q) = (kappa.len(), r_vec.len());
        let restr = LinearRestriction::new(r_mat.clone(), r_vec.clone()).unwrap();
        let once = restrict(&kappa, &v, &restr).unwrap();
        prop_assert!(max_abs(&restr.discrepancy(&once)) < 1e-10);
        let twice = restrict(&once, &v, &restr).unwrap();
        let gap: Vec<f64> = once.iter().zip(&twice).map(|(a, b)| a - b).collect();
        prop_assert!(max_abs(&gap) < 1e-10);

        // KKT: V⁻¹(κ̃ − κ̂) + Rᵀλ = 0, R κ̃ = r
        let vinv = solve_spd(&v, &Mat::identity(m)).unwrap();
        let mut kkt = Mat::zeros(m + q, m + q);
        kkt.set_block(0, 0, &vinv);
        kkt.set_block(0, m, &r_mat.transpose());
        kkt.set_block(m, 0, &r_mat);
        let mut rhs = vinv.matvec(&kappa);
        rhs.extend_from_slice(&r_vec);
        let sol = solve_general(&kkt, &rhs).unwrap();
        let gap: Vec<f64> = once.iter().zip(&sol[..m]).map(|(a, b)| a - b).collect();
        prop_assert!(max_abs(&gap) < 1e-8 * (1.0 + max_abs(&kappa)));
    }

    #[test]
    fn wald_ignores_restriction_coordinates((kappa, v, r_mat, r_vec) in fixture(), shift in 1.0..4.0f64) {
        let q = r_vec.len();
        let restr = LinearRestriction::new(r_mat, r_vec).unwrap();
        let w = wald_statistic(&kappa, &v, 300, &restr).unwrap();
        prop_assert!(w >= 0.0);
        let a = Mat::from_fn(q, q, |i, j| if i == j { shift } else { 0.3 / (1 + i + j) as f64 });
        let alt = LinearRestriction::new(a.matmul(&restr.r_mat), a.matvec(&restr.r_vec)).unwrap();
        let w2 = wald_statistic(&kappa, &v, 300, &alt).unwrap();
        prop_assert!((w - w2).abs() <= 1e-8 * w.max(1.0));
    }

    #[test]
    fn quantiles_are_order_statistics(v in prop::collection::vec(-1e3..1e3f64, 1..200), tau in 0.0..=1.0f64) {
        let q = empirical_quantile(&v, tau).unwrap();
        prop_assert!(v.contains(&q));
        let below = v.iter().filter(|&&x| x <= q).count() as f64;
        prop_assert!(below >= (tau * v.len() as f64).ceil().min(v.len() as f64));
    }

    #[test]
    fn grs_ignores_portfolio_order(seed in 0u64..1000, rot in 1usize..4) {
        let (t, n) = (40, 4);
        let mut rng = RngStream::new(seed, 0).rng();
        let x = Mat::from_fn(t, 2, |_, _| gdsur_core::numerics::std_normal(&mut rng));
        let y = Mat::from_fn(t, n, |s, i| 0.1 * i as f64 + x[(s, 0)] + gdsur_core::numerics::std_normal(&mut rng));
        let perm = Mat::from_fn(t, n, |s, i| y[(s, (i + rot) % n)]);
        let a = grs_test(&Panel::new(y, x.clone()).unwrap()).unwrap();
        let b = grs_test(&Panel::new(perm, x).unwrap()).unwrap();
        prop_assert!((a.statistic - b.statistic).abs() <= 1e-9 * a.statistic.max(1.0));
    }

    #[test]
    fn designs_are_stable_with_regime_zeros(seed in 0u64..10_000, regime in 0usize..3, r in 1usize..4, n in 1usize..6) {
        let regime = [Regime::Bd, Regime::Gexog, Regime::Ebd][regime];
        let spec = build_block_var(&DesignConfig::baseline(regime, r, n), RngStream::new(seed, 0)).unwrap();
        prop_assert!(spec.spectral_radius().unwrap() <= 0.91 + 1e-9);
        let psi = &spec.psi[0];
        match regime {
            Regime::Bd => prop_assert!(psi.xu.norm_max() == 0.0 && psi.ux.norm_max() == 0.0),
            Regime::Gexog => prop_assert!(psi.ux.norm_max() == 0.0 && psi.xu.norm_max() > 0.0),
            Regime::Ebd => prop_assert!(psi.ux.norm_max() > 0.0 && psi.xu.norm_max() > 0.0),
        }
        prop_assert!(spec.sigma().asymmetry() == 0.0);
    }
}
