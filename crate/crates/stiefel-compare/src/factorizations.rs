//! Matrix factorizations: QR with a positive-diagonal convention, direct
//! sampling of the triangular factor of a Gaussian matrix, a symmetric
//! eigensolver, positive-semidefinite square roots, and polar decomposition.
//!
//! The QR sign convention matters: forcing the diagonal of `R` to be positive
//! makes the factorization unique, makes the orthogonal factor of a Gaussian
//! matrix exactly rotation-invariant, and matches the distribution produced
//! by [`sample_bartlett_r`] (independent chi diagonal, standard normal
//! super-diagonal).

use crate::error::{Error, Result};
use crate::matrix::{DenseMatrix, Dims};
use crate::sampling::{sample_chi, RngStream, StiefelFrame};

/// Relative threshold below which a diagonal pivot counts as rank collapse.
const RANK_TOL: f64 = 1e-12;

/// Upper-triangular `k x k` factor with strictly positive diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct UpperTriangularR {
    k: usize,
    data: Vec<f64>,
}

impl UpperTriangularR {
    /// Validates shape, exact lower-triangular zeros, and a positive diagonal.
    pub fn new(k: usize, data: Vec<f64>) -> Result<Self> {
        if k == 0 || data.len() != k * k {
            return Err(Error::ShapeMismatch(format!(
                "expected {} entries for a {k}x{k} triangular factor, got {}",
                k * k,
                data.len()
            )));
        }
        for i in 0..k {
            for j in 0..i {
                if data[i * k + j] != 0.0 {
                    return Err(Error::InvalidArgument(format!(
                        "entry ({i},{j}) below the diagonal must be zero"
                    )));
                }
            }
            if !data[i * k + i].is_finite() || data[i * k + i] <= 0.0 {
                return Err(Error::InvalidArgument(format!(
                    "diagonal entry {i} must be positive, got {}",
                    data[i * k + i]
                )));
            }
        }
        Ok(UpperTriangularR { k, data })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        debug_assert!(i < self.k && j < self.k);
        self.data[i * self.k + j]
    }

    pub fn diag(&self, i: usize) -> f64 {
        self.get(i, i)
    }

    pub fn to_dense(&self) -> DenseMatrix {
        DenseMatrix::new(self.k, self.k, self.data.clone()).expect("validated at construction")
    }
}

/// Symmetric positive-semidefinite square-root factor of a Gram matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct WishartRoot {
    matrix: DenseMatrix,
}

impl WishartRoot {
    pub fn k(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &DenseMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> DenseMatrix {
        self.matrix
    }
}

/// Thin QR factorization `m = Q * R` of an `n x k` matrix (`k <= n`) with the
/// diagonal of `R` forced positive, so the factorization is unique.
///
/// Fails with [`Error::RankDeficient`] when any pivot falls below
/// `1e-12 * ||m||_F`.
pub fn qr_positive_diagonal(m: &DenseMatrix) -> Result<(StiefelFrame, UpperTriangularR)> {
    let n = m.rows();
    let k = m.cols();
    if k > n {
        return Err(Error::ShapeMismatch(format!(
            "QR requires at least as many rows as columns, got {n}x{k}"
        )));
    }
    // The scalar case is an exact algebraic identity, Q = sign, R = abs;
    // taking it directly keeps the factors free of reflector rounding.
    if n == 1 && k == 1 {
        let x = m.get(0, 0);
        if x == 0.0 {
            return Err(Error::RankDeficient("the scalar entry is zero".into()));
        }
        let q = DenseMatrix::new(1, 1, vec![if x < 0.0 { -1.0 } else { 1.0 }])?;
        let r = UpperTriangularR::new(1, vec![x.abs()])?;
        return Ok((StiefelFrame::new(q)?, r));
    }

    let scale = m.frobenius_norm();
    let mut a = m.clone();
    let mut reflectors: Vec<Vec<f64>> = Vec::with_capacity(k);
    let mut taus: Vec<f64> = Vec::with_capacity(k);

    for j in 0..k {
        // Householder vector for column j, acting on rows j..n.
        let mut v: Vec<f64> = (j..n).map(|i| a.get(i, j)).collect();
        let norm_x = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        // Opposite sign avoids cancellation in v[0].
        let alpha = if v[0] >= 0.0 { -norm_x } else { norm_x };
        v[0] -= alpha;
        let vnorm2: f64 = v.iter().map(|x| x * x).sum();
        let tau = if vnorm2 == 0.0 { 0.0 } else { 2.0 / vnorm2 };
        a.set(j, j, alpha);
        for i in j + 1..n {
            a.set(i, j, 0.0);
        }
        if tau != 0.0 && j + 1 < k {
            apply_reflector(&mut a, &v, tau, j, j + 1, k);
        }
        reflectors.push(v);
        taus.push(tau);
    }

    let tol = RANK_TOL * scale;
    for j in 0..k {
        if a.get(j, j).abs() <= tol {
            return Err(Error::RankDeficient(format!(
                "pivot {j} is {:.3e}, at or below tolerance {tol:.3e}",
                a.get(j, j)
            )));
        }
    }

    // Accumulate the thin orthogonal factor by applying the reflectors in
    // reverse to the leading k columns of the identity. When H_j is applied,
    // columns before j are still untouched unit vectors with zero tails, so
    // the update can start at column j.
    let mut q = DenseMatrix::zeros(n, k);
    for c in 0..k {
        q.set(c, c, 1.0);
    }
    for j in (0..k).rev() {
        if taus[j] != 0.0 {
            apply_reflector(&mut q, &reflectors[j], taus[j], j, j, k);
        }
    }

    // Flip signs so every diagonal entry of R is positive.
    for i in 0..k {
        if a.get(i, i) < 0.0 {
            for j in i..k {
                a.set(i, j, -a.get(i, j));
            }
            for row in 0..n {
                q.set(row, i, -q.get(row, i));
            }
        }
    }

    let mut r_data = vec![0.0; k * k];
    for i in 0..k {
        for j in i..k {
            r_data[i * k + j] = a.get(i, j);
        }
    }
    let r = UpperTriangularR::new(k, r_data)?;
    let frame = StiefelFrame::new(q)?;
    Ok((frame, r))
}

/// Applies `I - tau * v * v^T` (acting on rows `row0..`) to columns
/// `col0..col_end` of `a`.
fn apply_reflector(
    a: &mut DenseMatrix,
    v: &[f64],
    tau: f64,
    row0: usize,
    col0: usize,
    col_end: usize,
) {
    let width = col_end - col0;
    let mut w = vec![0.0; width];
    for (t, &vi) in v.iter().enumerate() {
        if vi == 0.0 {
            continue;
        }
        let row = &a.row(row0 + t)[col0..col_end];
        for (wc, &x) in w.iter_mut().zip(row) {
            *wc += vi * x;
        }
    }
    for (t, &vi) in v.iter().enumerate() {
        let f = tau * vi;
        if f == 0.0 {
            continue;
        }
        let row = &mut a.row_mut(row0 + t)[col0..col_end];
        for (x, &wc) in row.iter_mut().zip(&w) {
            *x -= f * wc;
        }
    }
}

/// Draws the triangular factor of an `n x k` standard Gaussian matrix
/// directly: independent entries with `R_ii` chi-distributed on `n - i`
/// degrees of freedom (zero-indexed rows) and standard normal entries above
/// the diagonal.
pub fn sample_bartlett_r(dims: Dims, stream: &mut RngStream) -> UpperTriangularR {
    let (n, k) = (dims.n(), dims.k());
    let mut data = vec![0.0; k * k];
    for i in 0..k {
        data[i * k + i] = sample_chi((n - i) as u64, stream).expect("dof >= 1 for valid dims");
        for j in i + 1..k {
            data[i * k + j] = stream.standard_normal();
        }
    }
    UpperTriangularR::new(k, data).expect("chi draws are positive")
}

/// Full eigendecomposition `s = V * diag(values) * V^T` of a symmetric matrix
/// by the cyclic Jacobi method. Eigenvalues are returned in ascending order
/// with matching columns of `V`.
pub fn jacobi_eigh(s: &DenseMatrix) -> Result<(Vec<f64>, DenseMatrix)> {
    let k = s.rows();
    if s.cols() != k {
        return Err(Error::ShapeMismatch(format!(
            "eigendecomposition requires a square matrix, got {}x{}",
            s.rows(),
            s.cols()
        )));
    }
    let asym = max_asymmetry(s);
    let scale = s.frobenius_norm();
    if asym > 1e-10 * (1.0 + scale) {
        return Err(Error::NotSymmetric(asym));
    }

    let mut a = s.clone();
    // Work on an exactly symmetric copy so rotations stay consistent.
    for i in 0..k {
        for j in 0..i {
            let v = a.get(j, i);
            a.set(i, j, v);
        }
    }
    let mut v = DenseMatrix::identity(k);
    let tol = 1e-12 * scale;
    let mut converged = scale == 0.0 || k == 1;

    for _sweep in 0..100 {
        if converged {
            break;
        }
        let mut off = 0.0;
        for i in 0..k {
            for j in i + 1..k {
                off += a.get(i, j) * a.get(i, j);
            }
        }
        if (2.0 * off).sqrt() <= tol {
            converged = true;
            break;
        }
        for p in 0..k - 1 {
            for q in p + 1..k {
                let apq = a.get(p, q);
                if apq == 0.0 {
                    continue;
                }
                let app = a.get(p, p);
                let aqq = a.get(q, q);
                let theta = (aqq - app) / (2.0 * apq);
                let t = if theta >= 0.0 {
                    1.0 / (theta + (theta * theta + 1.0).sqrt())
                } else {
                    -1.0 / (-theta + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s_rot = t * c;
                a.set(p, p, app - t * apq);
                a.set(q, q, aqq + t * apq);
                a.set(p, q, 0.0);
                a.set(q, p, 0.0);
                for i in 0..k {
                    if i != p && i != q {
                        let aip = a.get(i, p);
                        let aiq = a.get(i, q);
                        a.set(i, p, c * aip - s_rot * aiq);
                        a.set(p, i, c * aip - s_rot * aiq);
                        a.set(i, q, s_rot * aip + c * aiq);
                        a.set(q, i, s_rot * aip + c * aiq);
                    }
                }
                for i in 0..k {
                    let vip = v.get(i, p);
                    let viq = v.get(i, q);
                    v.set(i, p, c * vip - s_rot * viq);
                    v.set(i, q, s_rot * vip + c * viq);
                }
            }
        }
    }

    if !converged {
        // Final tolerance check after the last sweep.
        let mut off = 0.0;
        for i in 0..k {
            for j in i + 1..k {
                off += a.get(i, j) * a.get(i, j);
            }
        }
        if (2.0 * off).sqrt() > tol {
            return Err(Error::NoConvergence(format!(
                "Jacobi sweeps left off-diagonal mass {:.3e} above {tol:.3e}",
                (2.0 * off).sqrt()
            )));
        }
    }

    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&i, &j| {
        a.get(i, i)
            .partial_cmp(&a.get(j, j))
            .expect("eigenvalues are finite")
    });
    let values: Vec<f64> = order.iter().map(|&i| a.get(i, i)).collect();
    let vectors = DenseMatrix::from_fn(k, k, |i, j| v.get(i, order[j]));
    Ok((values, vectors))
}

fn max_asymmetry(s: &DenseMatrix) -> f64 {
    let k = s.rows();
    let mut worst: f64 = 0.0;
    for i in 0..k {
        for j in i + 1..k.min(s.cols()) {
            worst = worst.max((s.get(i, j) - s.get(j, i)).abs());
        }
    }
    worst
}

/// Symmetric positive-semidefinite square root of a symmetric PSD matrix.
///
/// Eigenvalues in `[-1e-8 * scale, 0)` are treated as rounding noise and
/// clamped to zero; anything more negative is a genuine indefiniteness error.
pub fn psd_sqrt(s: &DenseMatrix) -> Result<WishartRoot> {
    let (values, vectors) = jacobi_eigh(s)?;
    let scale = (1.0 + s.frobenius_norm()) * 1e-8;
    let mut roots = Vec::with_capacity(values.len());
    for &lambda in &values {
        if lambda < -scale {
            return Err(Error::NotPositiveSemidefinite(lambda));
        }
        roots.push(lambda.max(0.0).sqrt());
    }
    Ok(WishartRoot {
        matrix: sandwich_diag(&vectors, &roots),
    })
}

/// Builds the exactly symmetric product `V * diag(d) * V^T`.
fn sandwich_diag(v: &DenseMatrix, d: &[f64]) -> DenseMatrix {
    let k = v.rows();
    let mut out = DenseMatrix::zeros(k, k);
    for i in 0..k {
        for j in i..k {
            let mut acc = 0.0;
            for (t, &dt) in d.iter().enumerate() {
                acc += v.get(i, t) * dt * v.get(j, t);
            }
            out.set(i, j, acc);
            out.set(j, i, acc);
        }
    }
    out
}

/// Polar decomposition `gamma = Q * W` of a full-column-rank `n x k` matrix:
/// `Q` has orthonormal columns and `W` is the symmetric PSD square root of
/// the Gram matrix `gamma^T * gamma`.
pub fn polar_factorize(gamma: &DenseMatrix) -> Result<(StiefelFrame, WishartRoot)> {
    if gamma.cols() > gamma.rows() {
        return Err(Error::ShapeMismatch(format!(
            "polar decomposition requires at least as many rows as columns, got {}x{}",
            gamma.rows(),
            gamma.cols()
        )));
    }
    let gram = gamma.gram();
    let (values, vectors) = jacobi_eigh(&gram)?;
    let scale = gamma.frobenius_norm();
    let tol = RANK_TOL * scale;
    if values[0] <= tol * tol {
        return Err(Error::RankDeficient(format!(
            "smallest singular value {:.3e} at or below tolerance {tol:.3e}",
            values[0].max(0.0).sqrt()
        )));
    }
    let roots: Vec<f64> = values.iter().map(|&l| l.sqrt()).collect();
    let inv_roots: Vec<f64> = roots.iter().map(|&r| 1.0 / r).collect();
    let w = sandwich_diag(&vectors, &roots);
    let w_inv = sandwich_diag(&vectors, &inv_roots);
    let q = gamma.matmul(&w_inv)?;
    let frame = StiefelFrame::new(q)?;
    Ok((frame, WishartRoot { matrix: w }))
}

/// Draws the symmetric square-root factor of the Gram matrix of an `n x k`
/// standard Gaussian matrix.
pub fn sample_wishart_root(dims: Dims, stream: &mut RngStream) -> WishartRoot {
    let gamma = crate::sampling::sample_standard_gaussian(dims, stream);
    psd_sqrt(&gamma.gram()).expect("a Gaussian Gram matrix is symmetric PSD")
}
