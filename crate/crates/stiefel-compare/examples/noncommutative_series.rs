//! Series comparison: sums `sum_j Q_j A_j` built from independent uniform
//! square frames are dominated, for every norm and increasing convex
//! transform, by the matching Gaussian series inflated by the dimension-free
//! factor 3/2.
//!
//! Run with: `cargo run --example noncommutative_series`

use stiefel_compare::experiments::{run_ncgauss, RunSettings};
use stiefel_compare::functionals::{NormSpec, PhiSpec};
use stiefel_compare::matrix::DenseMatrix;
use stiefel_compare::Result;

fn main() -> Result<()> {
    let n = 8;
    let settings = RunSettings::new(4000, 77);

    // A two-term series: the identity plus a rank-heavy asymmetric coefficient.
    let a1 = DenseMatrix::identity(n);
    let a2 = DenseMatrix::from_fn(n, n, |i, j| if j == 0 { 1.0 + i as f64 / 4.0 } else { 0.1 });
    let coefficients = vec![a1, a2];

    for (norm, phi) in [
        (NormSpec::Spectral, PhiSpec::identity()),
        (NormSpec::Spectral, PhiSpec::power(2.0)?),
        (NormSpec::Frobenius, PhiSpec::identity()),
    ] {
        let r = run_ncgauss(n, &coefficients, norm, phi, settings)?;
        println!(
            "{:<10} {:<10} lhs {:.5} <= rhs {:.5}  [{}] margin {:+.1} se",
            r.norm.unwrap().to_string(),
            r.phi.clone().unwrap(),
            r.lhs.mean,
            r.rhs.mean,
            r.verdict.status,
            r.verdict.z_margin
        );
    }

    // With a single identity coefficient the series degenerates to the plain
    // one-matrix comparison at the square shape.
    let single = vec![DenseMatrix::identity(n)];
    let r = run_ncgauss(n, &single, NormSpec::Spectral, PhiSpec::identity(), settings)?;
    println!();
    println!(
        "single-term sanity check (J=1): lhs {:.5} <= rhs {:.5}  [{}]",
        r.lhs.mean, r.rhs.mean, r.verdict.status
    );
    Ok(())
}
