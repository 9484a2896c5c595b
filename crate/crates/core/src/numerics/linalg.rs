//! Factorizations and solvers: Cholesky, partial-pivot LU, Householder QR.

#[allow(unused_imports)] // inherent float methods shadow it when std is linked
use num_traits::Float;
use alloc::vec;
use alloc::vec::Vec;


use super::mat::{dot, Mat};
use super::rng::{std_normal, RngStream};
use crate::error::{Error, Result};

/// Relative symmetry tolerance accepted before factorization.
pub const SYMMETRY_TOL: f64 = 1e-10;

/// Lower-triangular Cholesky factor `L` with `L Lᵀ = A`.
#[derive(Clone, Debug)]
pub struct Cholesky {
    l: Mat,
}

impl Cholesky {
    pub fn new(a: &Mat) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::DimensionMismatch(alloc::format!(
                "cholesky needs a square matrix, got {}x{}",
                a.rows(),
                a.cols()
            )));
        }
        let scale = a.norm_max();
        let asym = a.asymmetry();
        if asym > SYMMETRY_TOL * scale.max(f64::MIN_POSITIVE) {
            return Err(Error::NotSymmetric { asymmetry: asym });
        }
        let n = a.rows();
        let mut l = a.symmetrize();
        // pivots below this are treated as numerically zero
        let floor = (n as f64) * f64::EPSILON * scale;
        for j in 0..n {
            let mut d = l[(j, j)];
            {
                let row_j = &l.as_slice()[j * n..j * n + j];
                d -= dot(row_j, row_j);
            }
            if !(d > floor) {
                return Err(Error::NotPositiveDefinite { index: j, pivot: d });
            }
            let djj = d.sqrt();
            l[(j, j)] = djj;
            for i in (j + 1)..n {
                let s = {
                    let data = l.as_slice();
                    dot(&data[i * n..i * n + j], &data[j * n..j * n + j])
                };
                l[(i, j)] = (l[(i, j)] - s) / djj;
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                l[(i, j)] = 0.0;
            }
        }
        Ok(Self { l })
    }

    pub fn factor(&self) -> &Mat {
        &self.l
    }

    pub fn into_factor(self) -> Mat {
        self.l
    }

    pub fn dim(&self) -> usize {
        self.l.rows()
    }

    pub fn log_det(&self) -> f64 {
        2.0 * self.l.diagonal().iter().map(|d| d.ln()).sum::<f64>()
    }

    /// Solves `L x = b` in place.
    pub fn forward_in_place(&self, b: &mut [f64]) {
        let n = self.dim();
        let l = self.l.as_slice();
        for i in 0..n {
            let s = dot(&l[i * n..i * n + i], &b[..i]);
            b[i] = (b[i] - s) / l[i * n + i];
        }
    }

    /// Solves `Lᵀ x = b` in place.
    pub fn backward_in_place(&self, b: &mut [f64]) {
        let n = self.dim();
        let l = self.l.as_slice();
        for i in (0..n).rev() {
            let mut s = b[i];
            for k in (i + 1)..n {
                s -= l[k * n + i] * b[k];
            }
            b[i] = s / l[i * n + i];
        }
    }

    pub fn solve_vec(&self, b: &[f64]) -> Vec<f64> {
        let mut x = b.to_vec();
        self.forward_in_place(&mut x);
        self.backward_in_place(&mut x);
        x
    }

    pub fn solve(&self, b: &Mat) -> Mat {
        assert_eq!(b.rows(), self.dim(), "solve shape mismatch");
        let mut out = Mat::zeros(b.rows(), b.cols());
        for j in 0..b.cols() {
            let x = self.solve_vec(&b.col_vec(j));
            for (i, v) in x.into_iter().enumerate() {
                out[(i, j)] = v;
            }
        }
        out
    }

    /// Applies `L⁻¹` to every column of `b`.
    pub fn whiten(&self, b: &Mat) -> Mat {
        let mut out = Mat::zeros(b.rows(), b.cols());
        for j in 0..b.cols() {
            let mut col = b.col_vec(j);
            self.forward_in_place(&mut col);
            for (i, v) in col.into_iter().enumerate() {
                out[(i, j)] = v;
            }
        }
        out
    }

    pub fn inverse(&self) -> Mat {
        self.solve(&Mat::identity(self.dim())).symmetrize()
    }
}

/// Cholesky factor of a symmetric positive-definite matrix.
pub fn cholesky(a: &Mat) -> Result<Mat> {
    Cholesky::new(a).map(Cholesky::into_factor)
}

/// Solves `a x = b` for symmetric positive-definite `a`.
pub fn solve_spd(a: &Mat, b: &Mat) -> Result<Mat> {
    if a.rows() != b.rows() {
        return Err(Error::DimensionMismatch(alloc::format!(
            "solve_spd: a is {}x{}, b has {} rows",
            a.rows(),
            a.cols(),
            b.rows()
        )));
    }
    Ok(Cholesky::new(a)?.solve(b))
}

pub fn inverse_spd(a: &Mat) -> Result<Mat> {
    Ok(Cholesky::new(a)?.inverse())
}

/// LU factorization with partial pivoting, for general square systems.
#[derive(Clone, Debug)]
pub struct Lu {
    lu: Mat,
    perm: Vec<usize>,
}

impl Lu {
    pub fn new(a: &Mat) -> Result<Self> {
        assert!(a.is_square(), "LU needs a square matrix");
        let n = a.rows();
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let scale = a.norm_max().max(f64::MIN_POSITIVE);
        for k in 0..n {
            let (p, pv) = (k..n).map(|i| (i, lu[(i, k)].abs())).fold((k, -1.0), |b, c| if c.1 > b.1 { c } else { b });
            if pv <= f64::EPSILON * scale * n as f64 {
                return Err(Error::SingularDesign { context: "LU factorization" });
            }
            if p != k {
                perm.swap(p, k);
                for j in 0..n {
                    let t = lu[(k, j)];
                    lu[(k, j)] = lu[(p, j)];
                    lu[(p, j)] = t;
                }
            }
            let d = lu[(k, k)];
            for i in (k + 1)..n {
                let f = lu[(i, k)] / d;
                lu[(i, k)] = f;
                if f != 0.0 {
                    for j in (k + 1)..n {
                        lu[(i, j)] -= f * lu[(k, j)];
                    }
                }
            }
        }
        Ok(Self { lu, perm })
    }

    pub fn solve_vec(&self, b: &[f64]) -> Vec<f64> {
        let n = self.lu.rows();
        let mut x: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let s = dot(&self.lu.row(i)[..i], &x[..i]);
            x[i] -= s;
        }
        for i in (0..n).rev() {
            let s = dot(&self.lu.row(i)[i + 1..], &x[i + 1..]);
            x[i] = (x[i] - s) / self.lu[(i, i)];
        }
        x
    }
}

/// Solves a general square system `a x = b`.
pub fn solve_general(a: &Mat, b: &[f64]) -> Result<Vec<f64>> {
    Ok(Lu::new(a)?.solve_vec(b))
}

/// Householder QR of a square or tall matrix. Returns `(Q, R)` with `Q`
/// `m×m` orthogonal and `R` upper triangular, signs fixed so `diag(R) ≥ 0`.
pub fn qr(a: &Mat) -> (Mat, Mat) {
    let (mut q, mut r) = householder_qr(a);
    let (m, n) = (a.rows(), a.cols());
    for k in 0..n.min(m) {
        if r[(k, k)] < 0.0 {
            for j in 0..n {
                r[(k, j)] = -r[(k, j)];
            }
            for i in 0..m {
                q[(i, k)] = -q[(i, k)];
            }
        }
    }
    (q, r)
}

/// Householder QR with the LAPACK `geqrf` sign convention: each reflector
/// sends its pivot column to `−sign(pivot)·‖column‖`, so `diag(R)` can have
/// either sign, and no reflector is applied to a trailing `1×1` block.
pub fn householder_qr(a: &Mat) -> (Mat, Mat) {
    let m = a.rows();
    let n = a.cols();
    let mut r = a.clone();
    let mut q = Mat::identity(m);
    let mut v = vec![0.0; m];
    for k in 0..n.min(m.saturating_sub(1)) {
        let norm: f64 = (k..m).map(|i| r[(i, k)] * r[(i, k)]).sum::<f64>().sqrt();
        if norm == 0.0 {
            continue;
        }
        let alpha = if r[(k, k)] >= 0.0 { -norm } else { norm };
        for i in 0..m {
            v[i] = if i < k { 0.0 } else { r[(i, k)] };
        }
        v[k] -= alpha;
        let vnorm2: f64 = v[k..].iter().map(|x| x * x).sum();
        if vnorm2 == 0.0 {
            continue;
        }
        // R <- (I - 2vvᵀ/vᵀv) R
        for j in 0..n {
            let s: f64 = (k..m).map(|i| v[i] * r[(i, j)]).sum::<f64>() * 2.0 / vnorm2;
            for i in k..m {
                r[(i, j)] -= s * v[i];
            }
        }
        // Q <- Q (I - 2vvᵀ/vᵀv)
        for i in 0..m {
            let s: f64 = (k..m).map(|j| q[(i, j)] * v[j]).sum::<f64>() * 2.0 / vnorm2;
            for j in k..m {
                q[(i, j)] -= s * v[j];
            }
        }
    }
    for i in 0..m {
        for j in 0..n.min(i) {
            r[(i, j)] = 0.0;
        }
    }
    (q, r)
}

/// Column-sign convention for [`random_orthogonal_with`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum QrSign {
    /// `diag(R) > 0`; `Q` is Haar distributed.
    #[default]
    PositiveDiagonal,
    /// Raw Householder factor as returned by LAPACK `geqrf`/`orgqr`. The
    /// leading entry of the first column is always negative.
    Householder,
}

/// Haar-distributed random orthogonal matrix from the QR factorization of an
/// i.i.d. Gaussian matrix, with the triangular factor's diagonal forced
/// positive.
pub fn random_orthogonal(m: usize, stream: RngStream) -> Mat {
    random_orthogonal_with(m, stream, QrSign::PositiveDiagonal)
}

/// Orthogonal factor of an i.i.d. Gaussian matrix under the given sign
/// convention. Both conventions consume the same Gaussian draws.
pub fn random_orthogonal_with(m: usize, stream: RngStream, sign: QrSign) -> Mat {
    assert!(m >= 1, "random_orthogonal needs m >= 1");
    let mut rng = stream.rng();
    loop {
        let g = Mat::from_fn(m, m, |_, _| std_normal(&mut rng));
        let (q, r) = householder_qr(&g);
        let min_diag = r.diagonal().iter().fold(f64::INFINITY, |a, &b| a.min(b.abs()));
        if min_diag > 1e-12 * g.norm_max() {
            return match sign {
                QrSign::Householder => q,
                QrSign::PositiveDiagonal => {
                    let mut q = q;
                    for k in 0..m {
                        if r[(k, k)] < 0.0 {
                            for i in 0..m {
                                q[(i, k)] = -q[(i, k)];
                            }
                        }
                    }
                    q
                }
            };
        }
    }
}
