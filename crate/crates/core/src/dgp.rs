//! Data-generating processes: block VAR(1) designs for the BD, GEXOG and EBD
//! exogeneity regimes, Gaussian simulation and analytic autocovariances.

#[allow(unused_imports)] // inherent float methods shadow it when std is linked
use num_traits::Float;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::error::{Error, Result};
use crate::numerics::{cholesky, random_orthogonal_with, solve_general, spectral_radius, std_normal, Mat, QrSign, RngStream};

/// Exogeneity regime of the joint `(x, u)` VAR.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Regime {
    /// Block diagonal: no feedback in either direction.
    Bd,
    /// Lagged `u` may drive `x`, lagged `x` does not drive `u`.
    Gexog,
    /// Both cross blocks active; only the innovations are orthogonal.
    Ebd,
}

impl Regime {
    pub const ALL: [Regime; 3] = [Regime::Bd, Regime::Gexog, Regime::Ebd];

    pub fn as_str(self) -> &'static str {
        match self {
            Regime::Bd => "bd",
            Regime::Gexog => "gexog",
            Regime::Ebd => "ebd",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_lowercase().as_str() {
            "bd" => Some(Regime::Bd),
            "gexog" => Some(Regime::Gexog),
            "ebd" => Some(Regime::Ebd),
            _ => None,
        }
    }
}

/// Lag-`j` coefficient blocks of the joint VAR for `(x̄_t, u_t)`.
#[derive(Clone, Debug, PartialEq)]
pub struct PsiBlocks {
    pub xx: Mat,
    pub xu: Mat,
    pub ux: Mat,
    pub uu: Mat,
}

impl PsiBlocks {
    pub fn zeros(r: usize, n: usize) -> Self {
        Self { xx: Mat::zeros(r, r), xu: Mat::zeros(r, n), ux: Mat::zeros(n, r), uu: Mat::zeros(n, n) }
    }

    /// The `(r+N)×(r+N)` joint matrix `[[Ψxx, Ψxu], [Ψux, Ψuu]]`.
    pub fn joint(&self) -> Mat {
        let r = self.xx.rows();
        let n = self.uu.rows();
        let mut m = Mat::zeros(r + n, r + n);
        m.set_block(0, 0, &self.xx);
        m.set_block(0, r, &self.xu);
        m.set_block(r, 0, &self.ux);
        m.set_block(r, r, &self.uu);
        m
    }

    fn scale_mut(&mut self, s: f64) {
        self.xx.scale_mut(s);
        self.xu.scale_mut(s);
        self.ux.scale_mut(s);
        self.uu.scale_mut(s);
    }
}

/// Joint VAR(p0) law of `(x_t − μx, u_t)` with block-orthogonal Gaussian
/// innovations.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockVarSpec {
    pub psi: Vec<PsiBlocks>,
    pub sigma_xx: Mat,
    pub sigma_uu: Mat,
    pub mu_x: Vec<f64>,
    pub regime: Regime,
}

impl BlockVarSpec {
    pub fn p0(&self) -> usize {
        self.psi.len()
    }

    pub fn r(&self) -> usize {
        self.sigma_xx.rows()
    }

    pub fn n(&self) -> usize {
        self.sigma_uu.rows()
    }

    /// Joint dimension `r + N`.
    pub fn m(&self) -> usize {
        self.r() + self.n()
    }

    /// `blockdiag(Σxx, Σuu)`.
    pub fn sigma(&self) -> Mat {
        let r = self.r();
        let mut s = Mat::zeros(self.m(), self.m());
        s.set_block(0, 0, &self.sigma_xx);
        s.set_block(r, r, &self.sigma_uu);
        s
    }

    pub fn companion(&self) -> Mat {
        companion(&self.psi.iter().map(PsiBlocks::joint).collect::<Vec<_>>())
    }

    pub fn spectral_radius(&self) -> Result<f64> {
        spectral_radius(&self.companion())
    }

    fn check_stable(&self) -> Result<()> {
        let rho = self.spectral_radius()?;
        if rho >= 1.0 {
            return Err(Error::UnstableSpec(rho));
        }
        Ok(())
    }
}

/// Companion matrix of a VAR with lag matrices `phi[0..p]`, each `m×m`.
pub fn companion(phi: &[Mat]) -> Mat {
    let p = phi.len();
    assert!(p >= 1, "companion needs at least one lag");
    let m = phi[0].rows();
    let mut f = Mat::zeros(m * p, m * p);
    for (j, ph) in phi.iter().enumerate() {
        f.set_block(0, j * m, ph);
    }
    for i in m..m * p {
        f[(i, i - m)] = 1.0;
    }
    f
}

/// Scale factors of the block construction.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Calibration {
    pub cxx: f64,
    pub cxu: f64,
    pub cux: f64,
    pub cuu: f64,
}

impl Default for Calibration {
    fn default() -> Self {
        Self { cxx: 0.4, cxu: 0.7, cux: 0.3, cuu: 0.5 }
    }
}

/// Everything needed to draw one design.
#[derive(Clone, Debug, PartialEq)]
pub struct DesignConfig {
    pub regime: Regime,
    pub r: usize,
    pub n: usize,
    pub c: Calibration,
    pub cross_rank: usize,
    pub rho_bar: f64,
    pub delta_xx: f64,
    pub delta_uu: f64,
    pub mu_x: f64,
    /// Column signs of the orthogonal factors. The LAPACK convention keeps
    /// the sign of the `x`–`u` feedback loop fixed across draws.
    pub qr_sign: QrSign,
}

impl DesignConfig {
    pub fn baseline(regime: Regime, r: usize, n: usize) -> Self {
        Self {
            regime,
            r,
            n,
            c: Calibration::default(),
            cross_rank: 1,
            rho_bar: 0.91,
            delta_xx: 0.1,
            delta_uu: 0.5,
            mu_x: 0.3,
            qr_sign: QrSign::Householder,
        }
    }
}

/// Draws a VAR(1) design. The substreams of `stream` are consumed in the
/// fixed order Qx, Qu, A, B, Σxx, Σuu; A and B are drawn under every regime
/// so that the three regimes share their remaining draws.
pub fn build_block_var(cfg: &DesignConfig, stream: RngStream) -> Result<BlockVarSpec> {
    let (r, n) = (cfg.r, cfg.n);
    if r == 0 || n == 0 {
        return Err(Error::InvalidParams(alloc::format!("need r, N >= 1, got r={r}, N={n}")));
    }
    let max_rank = r.min(n);
    if cfg.cross_rank > max_rank {
        return Err(Error::InvalidRank { rank: cfg.cross_rank, max: max_rank });
    }
    if !(cfg.rho_bar > 0.0 && cfg.rho_bar < 1.0) {
        return Err(Error::InvalidTarget(cfg.rho_bar));
    }
    let c = cfg.c;
    if [c.cxx, c.cxu, c.cux, c.cuu, cfg.delta_xx, cfg.delta_uu].iter().any(|v| !(*v >= 0.0)) {
        return Err(Error::InvalidParams("calibration constants must be nonnegative".into()));
    }
    let qx = random_orthogonal_with(r, stream.substream(0), cfg.qr_sign);
    let qu = random_orthogonal_with(n, stream.substream(1), cfg.qr_sign);
    let a = random_orthogonal_with(r, stream.substream(2), cfg.qr_sign).block(0, 0, r, cfg.cross_rank);
    let b = random_orthogonal_with(n, stream.substream(3), cfg.qr_sign).block(0, 0, n, cfg.cross_rank);
    let sigma_xx = random_spd(r, cfg.delta_xx, stream.substream(4));
    let sigma_uu = random_spd(n, cfg.delta_uu, stream.substream(5));

    let mut psi = PsiBlocks {
        xx: qx.scale(c.cxx),
        xu: a.matmul_t(&b).scale(c.cxu),
        ux: b.matmul_t(&a).scale(c.cux),
        uu: qu.scale(c.cuu),
    };
    match cfg.regime {
        Regime::Bd => {
            psi.xu = Mat::zeros(r, n);
            psi.ux = Mat::zeros(n, r);
        }
        Regime::Gexog => psi.ux = Mat::zeros(n, r),
        Regime::Ebd => {}
    }
    let rho = spectral_radius(&psi.joint())?;
    if rho > cfg.rho_bar {
        psi.scale_mut(cfg.rho_bar / rho);
    }
    Ok(BlockVarSpec { psi: vec![psi], sigma_xx, sigma_uu, mu_x: vec![cfg.mu_x; r], regime: cfg.regime })
}

/// `L Lᵀ` with `L` unit lower triangular and off-diagonal entries drawn
/// uniformly on `(−δ/√m, δ/√m)`.
pub fn random_spd(m: usize, delta: f64, stream: RngStream) -> Mat {
    let mut rng = stream.rng();
    let half = delta / (m as f64).sqrt();
    let mut l = Mat::identity(m);
    for i in 0..m {
        for j in 0..i {
            l[(i, j)] = if half > 0.0 { rng.random_range(-half..half) } else { 0.0 };
        }
    }
    l.matmul_t(&l)
}

/// Intercepts and slopes of the measurement equation.
#[derive(Clone, Debug, PartialEq)]
pub struct SystemParams {
    pub n: usize,
    pub r: usize,
    pub alpha: Vec<f64>,
    /// Equation-major: `beta[i*r..(i+1)*r]` is equation `i`'s slope vector.
    pub beta: Vec<f64>,
}

impl SystemParams {
    /// `α = 0`, `β = 1`.
    pub fn null(n: usize, r: usize) -> Self {
        Self { n, r, alpha: vec![0.0; n], beta: vec![1.0; n * r] }
    }

    /// The null parameters with `α₁` shifted to `shift`.
    pub fn alternative(n: usize, r: usize, shift: f64) -> Self {
        let mut p = Self::null(n, r);
        p.alpha[0] = shift;
        p
    }

    /// `κ = (α', β')'`.
    pub fn kappa(&self) -> Vec<f64> {
        let mut k = self.alpha.clone();
        k.extend_from_slice(&self.beta);
        k
    }

    pub fn from_kappa(n: usize, r: usize, kappa: &[f64]) -> Self {
        assert_eq!(kappa.len(), n * (1 + r), "kappa length");
        Self { n, r, alpha: kappa[..n].to_vec(), beta: kappa[n..].to_vec() }
    }
}

/// An observed sample: `y` is `T×N`, `x` is `T×r`.
#[derive(Clone, Debug, PartialEq)]
pub struct Panel {
    pub y: Mat,
    pub x: Mat,
    pub u_true: Option<Mat>,
}

impl Panel {
    pub fn new(y: Mat, x: Mat) -> Result<Self> {
        if y.rows() != x.rows() {
            return Err(Error::DimensionMismatch(alloc::format!(
                "y has {} rows, x has {}",
                y.rows(),
                x.rows()
            )));
        }
        if !y.is_finite() || !x.is_finite() {
            return Err(Error::NonFinite);
        }
        Ok(Self { y, x, u_true: None })
    }

    pub fn t(&self) -> usize {
        self.y.rows()
    }

    pub fn n(&self) -> usize {
        self.y.cols()
    }

    pub fn r(&self) -> usize {
        self.x.cols()
    }

    /// Enforces `T > r + 2·p_max + 2`.
    pub fn check_length(&self, p_max: usize) -> Result<()> {
        let needed = self.r() + 2 * p_max + 2;
        if self.t() <= needed {
            return Err(Error::InsufficientSample { needed, got: self.t() });
        }
        Ok(())
    }
}

/// `y_t = α + (I_N ⊗ x_tᵀ) β + u`, written into `y` (length N).
#[inline]
pub fn measurement(kappa: &[f64], x: &[f64], u: &[f64], y: &mut [f64]) {
    let n = y.len();
    let r = x.len();
    for i in 0..n {
        let b = &kappa[n + i * r..n + (i + 1) * r];
        y[i] = kappa[i] + crate::numerics::dot(b, x) + u[i];
    }
}

/// Simulates `T` observations after discarding `burn_in` from `z̄₀ = 0`.
pub fn simulate(spec: &BlockVarSpec, params: &SystemParams, t: usize, burn_in: usize, stream: RngStream) -> Result<Panel> {
    spec.check_stable()?;
    let (r, n, m, p) = (spec.r(), spec.n(), spec.m(), spec.p0());
    if params.n != n || params.r != r {
        return Err(Error::DimensionMismatch(alloc::format!(
            "params are N={}, r={}; spec is N={n}, r={r}",
            params.n,
            params.r
        )));
    }
    let lx = cholesky(&spec.sigma_xx)?;
    let lu = cholesky(&spec.sigma_uu)?;
    let phi: Vec<Mat> = spec.psi.iter().map(PsiBlocks::joint).collect();
    let kappa = params.kappa();
    let mut rng = stream.rng();

    // hist[j] holds z̄_{t−1−j}
    let mut hist = vec![vec![0.0; m]; p];
    let mut xi = vec![0.0; m];
    let mut z = vec![0.0; m];
    let mut y = Mat::zeros(t, n);
    let mut x = Mat::zeros(t, r);
    let mut u = Mat::zeros(t, n);
    for step in 0..(burn_in + t) {
        for v in xi.iter_mut() {
            *v = std_normal(&mut rng);
        }
        for i in 0..r {
            z[i] = crate::numerics::dot(&lx.row(i)[..=i], &xi[..=i]);
        }
        for i in 0..n {
            z[r + i] = crate::numerics::dot(&lu.row(i)[..=i], &xi[r..=r + i]);
        }
        for (ph, prev) in phi.iter().zip(&hist) {
            for i in 0..m {
                z[i] += crate::numerics::dot(ph.row(i), prev);
            }
        }
        hist.rotate_right(1);
        hist[0].copy_from_slice(&z);
        if step >= burn_in {
            let s = step - burn_in;
            for i in 0..r {
                x[(s, i)] = spec.mu_x[i] + z[i];
            }
            u.row_mut(s).copy_from_slice(&z[r..]);
            let xs = x.row(s).to_vec();
            measurement(&kappa, &xs, &z[r..], y.row_mut(s));
        }
    }
    Ok(Panel { y, x, u_true: Some(u) })
}

/// `Γ(ℓ) = E[z̄_t z̄_{t−ℓ}ᵀ]` for `ℓ = 0..=max_lag`, from the companion-form
/// Lyapunov equation.
pub fn analytic_autocov(spec: &BlockVarSpec, max_lag: usize) -> Result<Vec<Mat>> {
    spec.check_stable()?;
    let m = spec.m();
    let f = spec.companion();
    let d = f.rows();
    let mut sc = Mat::zeros(d, d);
    sc.set_block(0, 0, &spec.sigma());
    // (I − F⊗F) vec(Γ) = vec(Σc), row-major vec
    let dd = d * d;
    let mut a = Mat::zeros(dd, dd);
    for i in 0..d {
        for j in 0..d {
            let row = i * d + j;
            for k in 0..d {
                let fik = f[(i, k)];
                if fik == 0.0 {
                    continue;
                }
                for l in 0..d {
                    a[(row, k * d + l)] -= fik * f[(j, l)];
                }
            }
            a[(row, row)] += 1.0;
        }
    }
    let g0 = solve_general(&a, sc.as_slice())?;
    let mut g = Mat::from_vec(d, d, g0)?.symmetrize();
    let mut out = Vec::with_capacity(max_lag + 1);
    out.push(g.block(0, 0, m, m));
    for _ in 0..max_lag {
        g = f.matmul(&g);
        out.push(g.block(0, 0, m, m));
    }
    Ok(out)
}

/// Sample autocovariance `T⁻¹ Σ_t (z_t − z̄)(z_{t−ℓ} − z̄)ᵀ` of the rows of `z`.
pub fn sample_autocov(z: &Mat, lag: usize) -> Mat {
    let (t, m) = (z.rows(), z.cols());
    let mean = z.column_means();
    let mut g = Mat::zeros(m, m);
    for s in lag..t {
        for i in 0..m {
            let a = z[(s, i)] - mean[i];
            for j in 0..m {
                g[(i, j)] += a * (z[(s - lag, j)] - mean[j]);
            }
        }
    }
    g.scale(1.0 / t as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn cfg(regime: Regime) -> DesignConfig {
        DesignConfig::baseline(regime, 2, 5)
    }

    #[test]
    fn bd_zeroes_cross_blocks() {
        let s = build_block_var(&cfg(Regime::Bd), RngStream::new(1, 0)).unwrap();
        assert_eq!(s.psi[0].xu, Mat::zeros(2, 5));
        assert_eq!(s.psi[0].ux, Mat::zeros(5, 2));
        let g = build_block_var(&cfg(Regime::Gexog), RngStream::new(1, 0)).unwrap();
        assert_eq!(g.psi[0].ux, Mat::zeros(5, 2));
        assert!(g.psi[0].xu.norm_max() > 0.0);
    }

    #[test]
    fn baseline_respects_target_radius() {
        for seed in 0..20 {
            let s = build_block_var(&cfg(Regime::Ebd), RngStream::new(seed, 0)).unwrap();
            assert!(s.spectral_radius().unwrap() <= 0.91 + 1e-8);
            // A Bᵀ has unit spectral norm, so ‖Ψxu‖₂ ≤ cxu; Frobenius equals it at rank 1
            assert!(s.psi[0].xu.norm_fro() <= 0.7 + 1e-12);
        }
    }

    #[test]
    fn scalar_bd_unscaled() {
        let mut c = DesignConfig::baseline(Regime::Bd, 1, 1);
        c.c = Calibration { cxx: 0.5, cxu: 0.7, cux: 0.3, cuu: 0.5 };
        let s = build_block_var(&c, RngStream::new(3, 3)).unwrap();
        assert_abs_diff_eq!(s.spectral_radius().unwrap(), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(s.psi[0].xx[(0, 0)].abs(), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn builder_errors() {
        let mut c = cfg(Regime::Ebd);
        c.cross_rank = 3;
        assert_eq!(build_block_var(&c, RngStream::new(0, 0)), Err(Error::InvalidRank { rank: 3, max: 2 }));
        let mut c = cfg(Regime::Ebd);
        c.rho_bar = 1.0;
        assert_eq!(build_block_var(&c, RngStream::new(0, 0)), Err(Error::InvalidTarget(1.0)));
    }

    #[test]
    fn random_spd_shapes() {
        assert_eq!(random_spd(4, 0.0, RngStream::new(0, 0)), Mat::identity(4));
        let s = random_spd(10, 0.5, RngStream::new(4, 0));
        for i in 0..10 {
            assert!(s[(i, i)] >= 1.0);
            for j in 0..10 {
                // |L_ik| ≤ δ/√m off the diagonal and L_ii = 1
                let h = 0.5 / 10f64.sqrt();
                let bound: f64 = (0..=i.min(j)).map(|k| {
                    let a = if k == i { 1.0 } else { h };
                    let b = if k == j { 1.0 } else { h };
                    a * b
                }).sum();
                assert!(s[(i, j)].abs() <= bound + 1e-15);
            }
        }
        assert!(cholesky(&s).is_ok());
    }

    #[test]
    fn white_noise_when_psi_zero() {
        let spec = BlockVarSpec {
            psi: vec![PsiBlocks::zeros(1, 2)],
            sigma_xx: Mat::identity(1),
            sigma_uu: Mat::identity(2),
            mu_x: vec![0.0],
            regime: Regime::Bd,
        };
        let params = SystemParams { n: 2, r: 1, alpha: vec![0.0; 2], beta: vec![0.0; 2] };
        let t = 4000;
        let p = simulate(&spec, &params, t, 10, RngStream::new(5, 0)).unwrap();
        let g1 = sample_autocov(&p.y, 1);
        let g0 = sample_autocov(&p.y, 0);
        for i in 0..2 {
            assert!((g1[(i, i)] / g0[(i, i)]).abs() < 3.0 / (t as f64).sqrt());
        }
        assert_eq!(p.y, *p.u_true.as_ref().unwrap());
    }

    #[test]
    fn simulate_is_deterministic_and_checks_stability() {
        let spec = build_block_var(&cfg(Regime::Ebd), RngStream::new(8, 0)).unwrap();
        let params = SystemParams::null(5, 2);
        let a = simulate(&spec, &params, 50, 20, RngStream::new(8, 1)).unwrap();
        let b = simulate(&spec, &params, 50, 20, RngStream::new(8, 1)).unwrap();
        assert_eq!(a, b);
        let mut bad = spec.clone();
        bad.psi[0].uu = Mat::identity(5).scale(1.01);
        assert!(matches!(simulate(&bad, &params, 50, 20, RngStream::new(8, 1)), Err(Error::UnstableSpec(_))));
    }

    #[test]
    fn scalar_lyapunov() {
        let spec = BlockVarSpec {
            psi: vec![PsiBlocks { xx: Mat::diag(&[0.5]), xu: Mat::zeros(1, 1), ux: Mat::zeros(1, 1), uu: Mat::zeros(1, 1) }],
            sigma_xx: Mat::identity(1),
            sigma_uu: Mat::identity(1),
            mu_x: vec![0.0],
            regime: Regime::Bd,
        };
        let g = analytic_autocov(&spec, 2).unwrap();
        assert_abs_diff_eq!(g[0][(0, 0)], 4.0 / 3.0, epsilon = 1e-14);
        assert_abs_diff_eq!(g[1][(0, 0)], 2.0 / 3.0, epsilon = 1e-14);
        assert_abs_diff_eq!(g[0][(1, 1)], 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(g[1][(1, 1)], 0.0, epsilon = 1e-14);
    }
}
