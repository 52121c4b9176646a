//! Why the reverse comparison cannot hold for all convex transforms: with
//! phi = hinge at 1 applied to the spectral norm, the frame side is exactly
//! zero (a square frame always has spectral norm 1), while the Gaussian side
//! is strictly positive at every scale beta > 0. No finite constant can
//! bridge a positive number and zero.
//!
//! Run with: `cargo run --example hinge_counterexample`

use stiefel_compare::experiments::{run_counterexample, RunSettings};
use stiefel_compare::matrix::Dims;
use stiefel_compare::Result;

fn main() -> Result<()> {
    let settings = RunSettings::new(4000, 2);

    for (n, beta) in [(4usize, 1.0f64), (8, 1.0), (8, 2.0)] {
        let r = run_counterexample(Dims::new(n, n)?, beta, settings)?;
        println!(
            "n = {n}, beta = {beta}: E hinge(||beta G/sqrt(n)||) = {:.5} (se {:.1e}), \
             E hinge(||Q||) = {:.1e}, zero fraction {:.4} -> demonstrated: {}",
            r.gaussian_side.mean,
            r.gaussian_side.stderr,
            r.frame_side.mean,
            r.frame_zero_fraction,
            r.demonstrated
        );
        assert!(r.demonstrated);
    }

    println!();
    println!(
        "in one dimension the frame side is exactly 0.0 in every sample, \
         since |Q| = 1 and hinge(1) = 0:"
    );
    let r = run_counterexample(Dims::new(1, 1)?, 1.0, settings)?;
    println!(
        "  n = 1: gaussian side {:.5}, frame side {:?} (zero fraction {})",
        r.gaussian_side.mean, r.frame_side.mean, r.frame_zero_fraction
    );
    Ok(())
}
