//! Minimal dense row-major matrix type and the shape descriptor used by the
//! samplers.
//!
//! Everything in this crate works on small-to-moderate dense matrices (at most
//! a few hundred rows), so a flat `Vec<f64>` with row-major indexing is both
//! the simplest and the fastest representation for the access patterns here
//! (row sweeps in factorizations, Gram products, rank-1 updates).

use crate::error::{Error, Result};

/// Shape of a tall matrix ensemble: `n` rows (ambient dimension) and `k`
/// columns (frame size), with `1 <= k <= n` enforced at construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Dims {
    n: usize,
    k: usize,
}

impl Dims {
    /// Validates `1 <= k <= n`.
    pub fn new(n: usize, k: usize) -> Result<Self> {
        if n == 0 || k == 0 {
            return Err(Error::InvalidArgument(format!(
                "dimensions must be positive, got n={n}, k={k}"
            )));
        }
        if k > n {
            return Err(Error::InvalidArgument(format!(
                "need k <= n, got n={n}, k={k}"
            )));
        }
        Ok(Dims { n, k })
    }

    /// Ambient dimension (number of rows).
    pub fn n(&self) -> usize {
        self.n
    }

    /// Frame size (number of columns).
    pub fn k(&self) -> usize {
        self.k
    }

    /// Aspect ratio `k/n`, always in `(0, 1]`.
    pub fn aspect_ratio(&self) -> f64 {
        self.k as f64 / self.n as f64
    }
}

impl std::fmt::Display for Dims {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}, {})", self.n, self.k)
    }
}

/// Dense row-major matrix of `f64` entries.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    /// Builds a matrix from row-major data; checks length and finiteness.
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidArgument(
                "matrix dimensions must be positive".into(),
            ));
        }
        if data.len() != rows * cols {
            return Err(Error::ShapeMismatch(format!(
                "expected {} entries for a {}x{} matrix, got {}",
                rows * cols,
                rows,
                cols,
                data.len()
            )));
        }
        if let Some(bad) = data.iter().find(|x| !x.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "matrix entries must be finite, found {bad}"
            )));
        }
        Ok(DenseMatrix { rows, cols, data })
    }

    /// All-zeros matrix.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        DenseMatrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    /// Square identity matrix.
    pub fn identity(n: usize) -> Self {
        let mut m = DenseMatrix::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    /// Builds a matrix by evaluating `f(row, col)` at every position.
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        DenseMatrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        debug_assert!(i < self.rows && j < self.cols);
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        debug_assert!(i < self.rows && j < self.cols);
        self.data[i * self.cols + j] = value;
    }

    /// Contiguous view of row `i`.
    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    #[inline]
    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// Row-major view of all entries.
    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    /// Matrix product `self * other`.
    pub fn matmul(&self, other: &DenseMatrix) -> Result<DenseMatrix> {
        if self.cols != other.rows {
            return Err(Error::ShapeMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = DenseMatrix::zeros(self.rows, other.cols);
        // i-p-j loop order keeps both inner accesses row-contiguous.
        for i in 0..self.rows {
            for p in 0..self.cols {
                let a = self.data[i * self.cols + p];
                if a == 0.0 {
                    continue;
                }
                let src = &other.data[p * other.cols..(p + 1) * other.cols];
                let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (d, s) in dst.iter_mut().zip(src) {
                    *d += a * s;
                }
            }
        }
        Ok(out)
    }

    /// Gram matrix `selfᵀ * self` (always square `cols x cols`, symmetric).
    pub fn gram(&self) -> DenseMatrix {
        let k = self.cols;
        let mut out = DenseMatrix::zeros(k, k);
        for p in 0..self.rows {
            let row = self.row(p);
            for a in 0..k {
                let ra = row[a];
                if ra == 0.0 {
                    continue;
                }
                let dst = &mut out.data[a * k..a * k + k];
                for b in a..k {
                    dst[b] += ra * row[b];
                }
            }
        }
        // Mirror the upper triangle so the result is exactly symmetric.
        for a in 0..k {
            for b in 0..a {
                out.data[a * k + b] = out.data[b * k + a];
            }
        }
        out
    }

    /// Transposed copy.
    pub fn transpose(&self) -> DenseMatrix {
        DenseMatrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    /// Scaled copy `c * self`.
    pub fn scaled(&self, c: f64) -> DenseMatrix {
        DenseMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| c * x).collect(),
        }
    }

    /// Entrywise sum `self + other`.
    pub fn add(&self, other: &DenseMatrix) -> Result<DenseMatrix> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::ShapeMismatch(format!(
                "cannot add {}x{} and {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(DenseMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    /// Adds `c * other` into `self` in place.
    pub fn add_scaled_assign(&mut self, other: &DenseMatrix, c: f64) -> Result<()> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::ShapeMismatch(format!(
                "cannot add {}x{} and {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        for (d, s) in self.data.iter_mut().zip(&other.data) {
            *d += c * s;
        }
        Ok(())
    }

    /// Frobenius norm, the root of the sum of squared entries.
    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    /// Largest absolute entry.
    pub fn max_abs_entry(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    /// Largest absolute deviation from `other`.
    pub fn max_abs_diff(&self, other: &DenseMatrix) -> f64 {
        debug_assert_eq!(self.rows, other.rows);
        debug_assert_eq!(self.cols, other.cols);
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }
}
