//! Prints the exact comparison constant `alpha(k, n)` for a few frame shapes
//! together with its closed-form sandwiches, and shows that the rescaling
//! factor `sqrt(n) / alpha` never exceeds `1 + k/(2n)` (and so never 3/2).
//!
//! Run with: `cargo run --example alpha_constants`

use stiefel_compare::constants::{alpha_report, chi_mean, gordon_bound};
use stiefel_compare::matrix::Dims;
use stiefel_compare::Result;

fn main() -> Result<()> {
    println!("chi means E||g||_2 for a standard Gaussian vector in R^p:");
    for p in [1u64, 2, 3, 10, 100, 10_000] {
        let mean = chi_mean(p)?;
        println!(
            "  p = {p:>6}: {mean:>12.8} (between sqrt(p - 1/2) = {:.8} and sqrt(p) = {:.8})",
            ((p as f64) - 0.5).sqrt(),
            (p as f64).sqrt()
        );
    }

    println!();
    println!(
        "{:>4} {:>4} {:>12} {:>26} {:>26} {:>10} {:>10}",
        "n", "k", "alpha", "sum bounds", "integral bounds", "factor", "cap"
    );
    for (n, k) in [(4, 1), (16, 4), (16, 16), (64, 16), (256, 64), (256, 256)] {
        let r = alpha_report(k, n)?;
        println!(
            "{:>4} {:>4} {:>12.6} [{:>11.6}, {:>11.6}] [{:>11.6}, {:>11.6}] {:>10.6} {:>10.6}",
            r.n,
            r.k,
            r.alpha,
            r.lower_sum,
            r.upper_sum,
            r.lower_integral,
            r.upper_integral,
            r.factor_exact,
            r.factor_bound,
        );
        assert!(r.lower_sum < r.alpha && r.alpha < r.upper_sum);
        assert!(r.lower_integral <= r.alpha && r.alpha <= r.upper_integral);
        assert!(r.factor_exact <= r.factor_bound && r.factor_bound <= 1.5);
    }

    println!();
    println!("comparison against the classical square-root bound 1 + sqrt(k/n):");
    for (n, k) in [(64, 4), (64, 16), (64, 64)] {
        let r = alpha_report(k, n)?;
        let classical = gordon_bound(Dims::new(n, k)?);
        println!(
            "  (n, k) = ({n:>3}, {k:>3}): linear-ratio factor {:.6} vs classical {classical:.6}",
            r.factor_bound
        );
    }
    Ok(())
}
