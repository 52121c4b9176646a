//! Demonstrates the two factorization routes behind the comparison machinery:
//!
//! * QR with positive diagonal splits a Gaussian matrix into a uniform frame
//!   and a triangular factor whose law is known exactly (independent chi
//!   diagonal, standard normal strict upper triangle);
//! * the polar route splits the same matrix into a frame times the symmetric
//!   square root of its Gram matrix.
//!
//! The example verifies the triangular law empirically and reconstructs the
//! input from both factorizations.
//!
//! Run with: `cargo run --example bartlett_factorization`

use stiefel_compare::constants::chi_mean;
use stiefel_compare::factorizations::{polar_factorize, qr_positive_diagonal, sample_bartlett_r};
use stiefel_compare::matrix::Dims;
use stiefel_compare::sampling::{derive_substream, sample_standard_gaussian};
use stiefel_compare::Result;

fn main() -> Result<()> {
    let dims = Dims::new(10, 4)?;
    let (n, k) = (dims.n(), dims.k());
    let seed = 11;
    let n_samples = 20_000;

    // Empirical mean of each diagonal entry of R from the QR route.
    let mut diag_means = vec![0.0f64; k];
    for t in 0..n_samples {
        let mut stream = derive_substream(seed, t);
        let g = sample_standard_gaussian(dims, &mut stream);
        let (_, r) = qr_positive_diagonal(&g)?;
        for (i, acc) in diag_means.iter_mut().enumerate() {
            *acc += r.diag(i) / n_samples as f64;
        }
    }
    println!("diagonal of the triangular factor, {n_samples} QR draws at shape {dims}:");
    for (i, mean) in diag_means.iter().enumerate() {
        let expected = chi_mean((n - i) as u64)?;
        println!(
            "  R[{i}][{i}]: empirical {mean:.5}, chi mean with {:>2} dof {expected:.5}",
            n - i
        );
    }

    // The same law can be sampled directly, without forming a matrix.
    let mut stream = derive_substream(seed ^ 0xd1ce, 0);
    let direct = sample_bartlett_r(dims, &mut stream);
    println!();
    println!("a directly sampled triangular factor (first row): {:?}",
        (0..k).map(|j| direct.get(0, j)).collect::<Vec<_>>());

    // Both factorizations reconstruct the input.
    let mut stream = derive_substream(seed ^ 0xfeed, 0);
    let g = sample_standard_gaussian(dims, &mut stream);
    let (q, r) = qr_positive_diagonal(&g)?;
    let qr_err = q.matrix().matmul(&r.to_dense())?.max_abs_diff(&g);
    let (u, w) = polar_factorize(&g)?;
    let polar_err = u.matrix().matmul(w.matrix())?.max_abs_diff(&g);
    println!();
    println!("reconstruction error, QR route:    {qr_err:.3e}");
    println!("reconstruction error, polar route: {polar_err:.3e}");
    assert!(qr_err < 1e-10 && polar_err < 1e-10);
    Ok(())
}
