//! The exact-constant comparison: for convex functionals `f`, a uniform
//! random frame satisfies `E f(Q) <= E f(G / alpha)` where `G` is standard
//! Gaussian and `alpha(k, n)` is the exact constant — no slack factor at all.
//! For concave functionals the inequality reverses. This example exercises
//! one functional of each kind, plus a linear one where both directions hold
//! simultaneously.
//!
//! Run with: `cargo run --example convex_comparison`

use stiefel_compare::experiments::{run_convex_comparison, ConvexFunctional, RunSettings, Sense};
use stiefel_compare::functionals::{NormSpec, PhiSpec};
use stiefel_compare::matrix::Dims;
use stiefel_compare::Result;

fn main() -> Result<()> {
    let dims = Dims::new(16, 4)?;
    let settings = RunSettings::new(5000, 29);

    let convex = ConvexFunctional::PhiNorm {
        phi: PhiSpec::power(2.0)?,
        norm: NormSpec::Frobenius,
    };
    let r = run_convex_comparison(dims, &convex, Sense::Convex, settings)?;
    println!(
        "convex  {:<28} E[f(Q)] = {:.5} <= E[f(G/alpha)] = {:.5}  [{}]",
        convex.to_string(),
        r.lhs.mean,
        r.rhs.mean,
        r.verdict.status
    );

    // Negating a convex functional yields a concave one; the comparison flips.
    let concave = ConvexFunctional::Negated(Box::new(convex));
    let r = run_convex_comparison(dims, &concave, Sense::Concave, settings)?;
    println!(
        "concave {:<28} E[f(G/alpha)] = {:.5} <= E[f(Q)] = {:.5}  [{}]",
        concave.to_string(),
        r.lhs.mean,
        r.rhs.mean,
        r.verdict.status
    );

    // A linear functional is both convex and concave, so the two directions
    // squeeze the means together: E Q_00 = E G_00 / alpha (both are 0 here).
    let linear = ConvexFunctional::Entry { row: 0, col: 0 };
    for sense in [Sense::Convex, Sense::Concave] {
        let r = run_convex_comparison(dims, &linear, sense, settings)?;
        println!(
            "{:<7} {:<28} lhs = {:+.5} <= rhs = {:+.5}  [{}]",
            if sense == Sense::Convex { "convex" } else { "concave" },
            linear.to_string(),
            r.lhs.mean,
            r.rhs.mean,
            r.verdict.status
        );
    }

    // Asking for a direction the functional cannot certify is an error, not
    // a silent wrong answer.
    let err = run_convex_comparison(
        dims,
        &ConvexFunctional::PhiNorm {
            phi: PhiSpec::identity(),
            norm: NormSpec::Spectral,
        },
        Sense::Concave,
        settings,
    )
    .unwrap_err();
    println!();
    println!("requesting the concave direction for a norm fails: {err}");
    Ok(())
}
