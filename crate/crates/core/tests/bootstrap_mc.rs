use gdsur_core::bootstrap::{fdb_test, fit_null_generator, sieve_resample};
use gdsur_core::dgp::{build_block_var, simulate, BlockVarSpec, DesignConfig, PsiBlocks, Regime, SystemParams};
use gdsur_core::estimators::gd_fit;
use gdsur_core::inference::LinearRestriction;
use gdsur_core::numerics::{ks_distance, Mat};
use gdsur_core::RngStream;

#[test]
fn white_noise_sieve_is_near_zero() {
    let spec = BlockVarSpec {
        psi: vec![PsiBlocks::zeros(2, 3)],
        sigma_xx: Mat::identity(2),
        sigma_uu: Mat::identity(3),
        mu_x: vec![0.3, 0.3],
        regime: Regime::Bd,
    };
    let panel = simulate(&spec, &SystemParams::null(3, 2), 5000, 0, RngStream::new(1, 0)).unwrap();
    let gen = fit_null_generator(&panel, 1, None).unwrap();
    // sampling error of each coefficient is about 1/√5000
    assert!(gen.phi[0].norm_max() < 0.06, "{}", gen.phi[0].norm_max());
    assert!(gen.shrink.is_none());
}

#[test]
fn resamples_are_centred_on_the_null() {
    let spec = build_block_var(&DesignConfig::baseline(Regime::Ebd, 2, 3), RngStream::new(2, 0)).unwrap();
    let panel = simulate(&spec, &SystemParams::null(3, 2), 200, 500, RngStream::new(2, 1)).unwrap();
    let restr = LinearRestriction::alpha_zero(3, 2);
    let gen = fit_null_generator(&panel, 1, Some(&restr)).unwrap();
    assert!(gen.kappa_gen[..3].iter().all(|&a| a == 0.0));
    let stream = RngStream::new(2, 2);
    let reps = 500;
    let mut mean = [0.0; 3];
    let mut sq = [0.0; 3];
    for b in 0..reps {
        let pn = sieve_resample(&gen, 200, stream.substream(b)).unwrap();
        let fit = gd_fit(&pn, 1).unwrap();
        for i in 0..3 {
            mean[i] += fit.kappa_hat[i] / reps as f64;
            sq[i] += fit.kappa_hat[i].powi(2) / reps as f64;
        }
    }
    for i in 0..3 {
        let se = ((sq[i] - mean[i] * mean[i]) / reps as f64).sqrt();
        // allowance for the finite-sample GD bias at T=200
        assert!(mean[i].abs() < 4.0 * se + 0.02, "alpha_{i}: mean {} se {se}", mean[i]);
    }
}

#[test]
fn first_level_p_values_are_uniform_under_the_null() {
    let reps = 500;
    let restr = LinearRestriction::alpha_zero(5, 2);
    let p_star: Vec<f64> = (0..reps)
        .map(|m| {
            let s = RngStream::new(3, m);
            let spec = build_block_var(&DesignConfig::baseline(Regime::Bd, 2, 5), s.substream(0)).unwrap();
            let panel = simulate(&spec, &SystemParams::null(5, 2), 400, 500, s.substream(1)).unwrap();
            let out = fdb_test(&panel, &restr, 1, 199, s.substream(2)).unwrap();
            out.bootstrap.unwrap().p_star
        })
        .collect();
    let ks = ks_distance(&p_star, |x| x.clamp(0.0, 1.0));
    // 1% critical value of the one-sample KS statistic
    assert!(ks < 1.628 / (reps as f64).sqrt(), "KS {ks}");
}
