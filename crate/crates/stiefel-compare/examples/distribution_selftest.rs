//! Runs the statistical self-test battery that guards the samplers: the
//! triangular-factor law from the QR route, invariance of the frame
//! distribution under a fixed rotation, and the permutation-symmetrized mean
//! of the triangular factor matching `alpha(k, n)` on the diagonal.
//!
//! Run with: `cargo run --example distribution_selftest`

use stiefel_compare::experiments::{run_distribution_selftests, RunSettings};
use stiefel_compare::matrix::Dims;
use stiefel_compare::Result;

fn main() -> Result<()> {
    let dims = Dims::new(12, 3)?;
    let settings = RunSettings::new(20_000, 0);
    let report = run_distribution_selftests(dims, settings)?;

    println!("self-test battery at {dims}, {} samples per family:", 20_000);
    for check in &report.checks {
        println!(
            "  [{}] {:<40} statistic {:>8.4}  threshold {:>6.2}",
            if check.passed { "pass" } else { "FAIL" },
            check.name,
            check.statistic,
            check.threshold
        );
    }
    println!();
    println!(
        "{}/{} checks passed in {:.2?}",
        report.checks.len() - report.failed_checks().len(),
        report.checks.len(),
        report.wall_time
    );
    assert!(report.all_passed());
    Ok(())
}
