//! Seeded samplers for the matrix ensembles under comparison.
//!
//! Reproducibility contract: every sampler is a deterministic function of its
//! arguments and the state of the [`RngStream`] it consumes. Streams are
//! addressed by `(master_seed, stream_index)`; distinct indices yield
//! independent streams of the same keyed cipher, so per-sample substreams can
//! be assigned by counter and results do not depend on how work is scheduled
//! across threads.

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};

use crate::error::{Error, Result};
use crate::matrix::{DenseMatrix, Dims};

/// Columns of a frame may deviate from exact orthonormality by at most this
/// much (in max-absolute-entry distance of the Gram matrix from the identity).
pub const ORTHONORMALITY_TOL: f64 = 1e-10;

/// One independent stream of a counter-based seeded generator.
pub struct RngStream {
    rng: ChaCha8Rng,
}

/// Opens the substream `stream_index` of the generator keyed by `master_seed`.
pub fn derive_substream(master_seed: u64, stream_index: u64) -> RngStream {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(stream_index);
    RngStream { rng }
}

impl RngStream {
    /// One standard normal variate.
    pub fn standard_normal(&mut self) -> f64 {
        StandardNormal.sample(&mut self.rng)
    }

    /// One uniform draw from `0..=bound`.
    fn uniform_inclusive(&mut self, bound: usize) -> usize {
        self.rng.random_range(0..=bound)
    }

    /// One Gamma(shape, 1) variate.
    fn gamma(&mut self, shape: f64) -> f64 {
        Gamma::new(shape, 1.0)
            .expect("gamma shape is positive")
            .sample(&mut self.rng)
    }
}

/// An `n x k` matrix with orthonormal columns, validated at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct StiefelFrame {
    matrix: DenseMatrix,
    dims: Dims,
}

impl StiefelFrame {
    /// Wraps a matrix after checking its columns are orthonormal to within
    /// [`ORTHONORMALITY_TOL`].
    pub fn new(matrix: DenseMatrix) -> Result<Self> {
        let dims = Dims::new(matrix.rows(), matrix.cols())?;
        let deviation = orthonormality_deviation(&matrix);
        if deviation > ORTHONORMALITY_TOL {
            return Err(Error::NotOrthonormal(deviation));
        }
        Ok(StiefelFrame { matrix, dims })
    }

    pub fn matrix(&self) -> &DenseMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> DenseMatrix {
        self.matrix
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }
}

/// Max-absolute-entry distance of the column Gram matrix from the identity.
pub fn orthonormality_deviation(matrix: &DenseMatrix) -> f64 {
    let gram = matrix.gram();
    let id = DenseMatrix::identity(matrix.cols());
    gram.max_abs_diff(&id)
}

/// An `n x k` matrix of independent standard normal entries, filled in
/// row-major order.
pub fn sample_standard_gaussian(dims: Dims, stream: &mut RngStream) -> DenseMatrix {
    let mut m = DenseMatrix::zeros(dims.n(), dims.k());
    for i in 0..dims.n() {
        let row = m.row_mut(i);
        for x in row.iter_mut() {
            *x = stream.standard_normal();
        }
    }
    m
}

/// An `n x k` Gaussian matrix with entry variance `1/n` (expected squared
/// column length one), the natural scale for comparison against frames.
pub fn sample_normalized_gaussian(dims: Dims, stream: &mut RngStream) -> DenseMatrix {
    sample_standard_gaussian(dims, stream).scaled(1.0 / (dims.n() as f64).sqrt())
}

/// A uniformly random (rotation-invariant) orthonormal `n x k` frame,
/// obtained as the orthogonal factor of a Gaussian matrix under the
/// positive-diagonal convention.
pub fn sample_haar_stiefel(dims: Dims, stream: &mut RngStream) -> StiefelFrame {
    let gaussian = sample_standard_gaussian(dims, stream);
    let (q, _) = crate::factorizations::qr_positive_diagonal(&gaussian)
        .expect("a Gaussian matrix has full column rank almost surely");
    q
}

/// One chi-distributed variate with `dof` degrees of freedom, via the square
/// root of a Gamma(dof/2, 2) draw.
pub fn sample_chi(dof: u64, stream: &mut RngStream) -> Result<f64> {
    if dof == 0 {
        return Err(Error::InvalidArgument(
            "chi sampler requires at least one degree freedom".into(),
        ));
    }
    Ok((2.0 * stream.gamma(dof as f64 / 2.0)).sqrt())
}

/// A permutation of `{0, .., k-1}`, stored as the image list `i -> pi(i)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Permutation {
    map: Vec<usize>,
}

impl Permutation {
    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    /// Image list: entry `i` is `pi(i)`.
    pub fn as_slice(&self) -> &[usize] {
        &self.map
    }

    /// The permutation matrix `P` with `P e_i = e_{pi(i)}`.
    pub fn to_matrix(&self) -> DenseMatrix {
        let k = self.map.len();
        let mut p = DenseMatrix::zeros(k, k);
        for (i, &pi) in self.map.iter().enumerate() {
            p.set(pi, i, 1.0);
        }
        p
    }

    /// Conjugation `P * m * P^T` computed by index relabeling.
    pub fn conjugate(&self, m: &DenseMatrix) -> Result<DenseMatrix> {
        let k = self.map.len();
        if m.rows() != k || m.cols() != k {
            return Err(Error::ShapeMismatch(format!(
                "cannot conjugate a {}x{} matrix by a permutation of {} symbols",
                m.rows(),
                m.cols(),
                k
            )));
        }
        let mut out = DenseMatrix::zeros(k, k);
        for i in 0..k {
            for j in 0..k {
                out.set(self.map[i], self.map[j], m.get(i, j));
            }
        }
        Ok(out)
    }
}

/// A uniformly random permutation of `k` symbols (Fisher-Yates).
pub fn sample_uniform_permutation(k: usize, stream: &mut RngStream) -> Permutation {
    let mut map: Vec<usize> = (0..k).collect();
    for i in (1..k).rev() {
        let j = stream.uniform_inclusive(i);
        map.swap(i, j);
    }
    Permutation { map }
}
