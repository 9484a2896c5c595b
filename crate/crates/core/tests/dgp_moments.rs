use gdsur_core::dgp::{analytic_autocov, build_block_var, sample_autocov, simulate, DesignConfig, Regime, SystemParams};
use gdsur_core::numerics::Mat;
use gdsur_core::RngStream;

#[test]
fn long_samples_match_the_analytic_autocovariances() {
    for (i, regime) in [Regime::Bd, Regime::Gexog, Regime::Ebd].into_iter().enumerate() {
        let spec = build_block_var(&DesignConfig::baseline(regime, 2, 3), RngStream::new(40 + i as u64, 0)).unwrap();
        let panel = simulate(&spec, &SystemParams::null(3, 2), 200_000, 500, RngStream::new(40 + i as u64, 1)).unwrap();
        let u = panel.u_true.clone().unwrap();
        let z = Mat::hstack(&[&panel.x, &u]);
        let analytic = analytic_autocov(&spec, 2).unwrap();
        for (lag, g) in analytic.iter().enumerate() {
            let s = sample_autocov(&z, lag);
            // persistence 0.91 inflates the sampling error well above 1/√T
            let err = s.sub(g).norm_max();
            assert!(err < 0.05 * g.norm_max().max(1.0), "{regime:?} lag {lag}: {err}");
        }
    }
}

#[test]
fn intercepts_shift_the_means() {
    let spec = build_block_var(&DesignConfig::baseline(Regime::Ebd, 2, 3), RngStream::new(7, 0)).unwrap();
    let null = simulate(&spec, &SystemParams::null(3, 2), 500, 100, RngStream::new(7, 1)).unwrap();
    let alt = simulate(&spec, &SystemParams::alternative(3, 2, 0.2), 500, 100, RngStream::new(7, 1)).unwrap();
    assert_eq!(null.x, alt.x);
    for s in 0..500 {
        assert!((alt.y[(s, 0)] - null.y[(s, 0)] - 0.2).abs() < 1e-12);
        assert_eq!(alt.y[(s, 1)], null.y[(s, 1)]);
    }
}
