//! Exact comparison constants for the frame-versus-Gaussian experiments.
//!
//! The central quantity is `alpha(k, n)`, the average of the expected lengths
//! of the diagonal entries in the triangular factor of an `n x k` standard
//! Gaussian matrix: `alpha = (1/k) * sum_{i=1..k} chi_mean(n - i + 1)`, where
//! `chi_mean(p)` is the mean of a chi random variable with `p` degrees of
//! freedom. The module also provides closed-form two-sided bounds on `alpha`
//! and the derived scaling factors used by the comparison theorems.

use crate::error::{Error, Result};
use crate::matrix::Dims;

const LN_2PI: f64 = 1.837_877_066_409_345_3;

/// Lanczos coefficients (g = 7, 9 terms); relative accuracy ~1e-14 for
/// arguments >= 0.5, which is all this crate ever evaluates. The digits are
/// kept exactly as published even where they exceed f64 resolution.
#[allow(clippy::excessive_precision)]
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Natural log of the gamma function for `x >= 0.5`.
///
/// Only half-integer and integer arguments at least 0.5 arise in this crate,
/// so the reflection branch is deliberately omitted.
pub fn ln_gamma(x: f64) -> f64 {
    debug_assert!(x >= 0.5, "ln_gamma requires x >= 0.5, got {x}");
    let z = x - 1.0;
    let mut acc = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        acc += c / (z + i as f64);
    }
    let t = z + 7.5;
    0.5 * LN_2PI + (z + 0.5) * t.ln() - t + acc.ln()
}

/// Mean of a chi random variable with `p` degrees of freedom:
/// `sqrt(2) * Gamma((p+1)/2) / Gamma(p/2)`.
///
/// Satisfies the strict bounds `sqrt(p - 1/2) < chi_mean(p) < sqrt(p)`.
/// Small `p` uses log-gamma differences; large `p` switches to an asymptotic
/// expansion because the cancellation in the log-gamma difference would
/// otherwise swamp the razor-thin gap over `sqrt(p - 1/2)`.
pub fn chi_mean(p: u64) -> Result<f64> {
    if p == 0 {
        return Err(Error::InvalidArgument(
            "chi mean requires at least one degree of freedom".into(),
        ));
    }
    if p <= SERIES_SWITCH {
        Ok(chi_mean_lgamma(p))
    } else {
        Ok(chi_mean_series(p))
    }
}

/// Degrees of freedom above which the asymptotic branch takes over. At the
/// switch point the log-gamma route still has ~1e-13 relative error while the
/// series truncation is already below 3e-15, so both branches are near their
/// best and the crossover loses nothing.
const SERIES_SWITCH: u64 = 128;

fn chi_mean_lgamma(p: u64) -> f64 {
    let p = p as f64;
    (0.5 * std::f64::consts::LN_2 + ln_gamma((p + 1.0) / 2.0) - ln_gamma(p / 2.0)).exp()
}

/// Asymptotic expansion of `sqrt(2) * Gamma((p+1)/2) / Gamma(p/2)` in powers
/// of `1/p`; the truncation error is below 1e-16 relative for `p > 1000`.
fn chi_mean_series(p: u64) -> f64 {
    let p = p as f64;
    let correction = 1.0 - 1.0 / (4.0 * p) + 1.0 / (32.0 * p * p) + 5.0 / (128.0 * p * p * p)
        - 21.0 / (2048.0 * p * p * p * p)
        - 399.0 / (8192.0 * p * p * p * p * p);
    p.sqrt() * correction
}

/// The comparison constant `alpha(k, n)`: average expected length of the
/// diagonal of the triangular factor of an `n x k` standard Gaussian matrix.
pub fn alpha_exact(k: usize, n: usize) -> Result<f64> {
    check_dims(k, n)?;
    let mut sum = 0.0;
    for i in 1..=k {
        sum += chi_mean((n - i + 1) as u64).expect("dof >= 1 for valid dims");
    }
    Ok(sum / k as f64)
}

/// Two-sided bound on `alpha(k, n)` obtained by bounding each chi mean
/// termwise: `(1/k) * sum sqrt(n - i + 1/2) < alpha < (1/k) * sum sqrt(n - i + 1)`.
pub fn alpha_bounds_sum(k: usize, n: usize) -> Result<(f64, f64)> {
    check_dims(k, n)?;
    let mut lower = 0.0;
    let mut upper = 0.0;
    for i in 1..=k {
        let p = (n - i + 1) as f64;
        lower += (p - 0.5).sqrt();
        upper += p.sqrt();
    }
    Ok((lower / k as f64, upper / k as f64))
}

/// Closed-form bound on `alpha(k, n)` obtained by integral comparison:
/// `lower = (2/(3k)) * (n^{3/2} - (n-k)^{3/2})` and
/// `upper = lower + (1/(2k)) * (sqrt(n) - sqrt(n-k))`.
pub fn alpha_bounds_integral(k: usize, n: usize) -> Result<(f64, f64)> {
    check_dims(k, n)?;
    let nf = n as f64;
    let mf = (n - k) as f64;
    let lower = 2.0 / (3.0 * k as f64) * (nf * nf.sqrt() - mf * mf.sqrt());
    let upper = lower + (nf.sqrt() - mf.sqrt()) / (2.0 * k as f64);
    Ok((lower, upper))
}

/// The scaling factor `sqrt(n) / alpha(k, n)` together with its closed-form
/// upper bound `1 + k/(2n)`. The exact value never exceeds the bound; in
/// particular the factor is at most 3/2 for every admissible shape.
pub fn comparison_factor(k: usize, n: usize) -> Result<(f64, f64)> {
    let alpha = alpha_exact(k, n)?;
    let exact = (n as f64).sqrt() / alpha;
    let bound = 1.0 + k as f64 / (2.0 * n as f64);
    debug_assert!(
        exact <= bound + 1e-12,
        "factor bound violated at k={k}, n={n}: {exact} > {bound}"
    );
    Ok((exact, bound))
}

/// Upper bound on the expected spectral norm of an `n x k` Gaussian matrix
/// with entries of variance `1/n`: one plus the root of the aspect ratio.
pub fn gordon_bound(dims: Dims) -> f64 {
    1.0 + dims.aspect_ratio().sqrt()
}

/// One row of the constants table: `alpha`, its bounds, and the scaling
/// factors for a single shape.
#[derive(Debug, Clone, PartialEq)]
pub struct AlphaReport {
    pub n: usize,
    pub k: usize,
    pub alpha: f64,
    pub lower_sum: f64,
    pub upper_sum: f64,
    pub lower_integral: f64,
    pub upper_integral: f64,
    pub factor_exact: f64,
    pub factor_bound: f64,
}

/// Computes the full constants row for one shape.
pub fn alpha_report(k: usize, n: usize) -> Result<AlphaReport> {
    let alpha = alpha_exact(k, n)?;
    let (lower_sum, upper_sum) = alpha_bounds_sum(k, n)?;
    let (lower_integral, upper_integral) = alpha_bounds_integral(k, n)?;
    let (factor_exact, factor_bound) = comparison_factor(k, n)?;
    Ok(AlphaReport {
        n,
        k,
        alpha,
        lower_sum,
        upper_sum,
        lower_integral,
        upper_integral,
        factor_exact,
        factor_bound,
    })
}

fn check_dims(k: usize, n: usize) -> Result<()> {
    if k == 0 || n == 0 {
        return Err(Error::InvalidArgument(format!(
            "dimensions must be positive, got k={k}, n={n}"
        )));
    }
    if k > n {
        return Err(Error::InvalidArgument(format!(
            "need k <= n, got k={k}, n={n}"
        )));
    }
    Ok(())
}
