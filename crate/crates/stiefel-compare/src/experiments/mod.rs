//! Monte Carlo engine and experiment drivers.
//!
//! Determinism contract: every sample draws from its own substream, addressed
//! as `plan.offset + plan.stride * sample_index`, and reductions happen
//! sequentially over the collected (ordered) sample vector. Results are
//! therefore bit-identical no matter how many worker threads run the sampling
//! loop.

mod runs;
mod selftest;

pub use runs::*;
pub use selftest::*;

use crate::error::{Error, Result};
use crate::sampling::{derive_substream, RngStream};
use rayon::prelude::*;

/// How an estimate maps sample indices to substream indices. Paired
/// experiments give the two sides disjoint residue classes so their draws
/// stay independent.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StreamPlan {
    pub offset: u64,
    pub stride: u64,
}

impl StreamPlan {
    /// Substream index for sample `i`.
    pub fn index(&self, i: usize) -> u64 {
        self.offset + self.stride * i as u64
    }
}

/// Left/right plans for two-sided comparisons (even/odd substreams).
pub const PLAN_LHS: StreamPlan = StreamPlan { offset: 0, stride: 2 };
pub const PLAN_RHS: StreamPlan = StreamPlan { offset: 1, stride: 2 };
/// Plan for single-estimate experiments.
pub const PLAN_SINGLE: StreamPlan = StreamPlan { offset: 0, stride: 1 };

/// Shared knobs for every experiment run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunSettings {
    pub n_samples: usize,
    pub seed: u64,
    /// How many standard errors of separation count as a violation.
    pub z_policy: f64,
    /// Worker threads for the sampling loop; `None` uses the global pool.
    pub workers: Option<usize>,
}

impl RunSettings {
    pub fn new(n_samples: usize, seed: u64) -> Self {
        RunSettings {
            n_samples,
            seed,
            z_policy: 3.0,
            workers: None,
        }
    }

    pub fn with_z(mut self, z: f64) -> Self {
        self.z_policy = z;
        self
    }

    pub fn with_workers(mut self, workers: Option<usize>) -> Self {
        self.workers = workers;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_samples < 2 {
            return Err(Error::InvalidArgument(format!(
                "need at least two samples, got {}",
                self.n_samples
            )));
        }
        if !self.z_policy.is_finite() || self.z_policy <= 0.0 {
            return Err(Error::InvalidArgument(format!(
                "z policy must be a positive number, got {}",
                self.z_policy
            )));
        }
        if self.workers == Some(0) {
            return Err(Error::InvalidArgument(
                "worker count must be at least one".into(),
            ));
        }
        Ok(())
    }
}

/// Runs `f` once per sample on that sample's own substream and returns the
/// results in sample order.
pub(crate) fn collect_samples<T, F>(
    n_samples: usize,
    master_seed: u64,
    plan: StreamPlan,
    workers: Option<usize>,
    f: F,
) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(&mut RngStream) -> T + Sync,
{
    let body = || {
        (0..n_samples)
            .into_par_iter()
            .map(|i| {
                let mut stream = derive_substream(master_seed, plan.index(i));
                f(&mut stream)
            })
            .collect::<Vec<T>>()
    };
    match workers {
        None => Ok(body()),
        Some(w) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(w)
                .build()
                .map_err(|e| Error::Config(format!("cannot build worker pool: {e}")))?;
            Ok(pool.install(body))
        }
    }
}

/// A Monte Carlo mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub n_samples: usize,
}

impl McEstimate {
    /// Two-pass mean/stderr over an ordered sample vector; the reduction is
    /// sequential so results do not depend on thread count.
    pub fn from_samples(values: &[f64]) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::InvalidArgument(
                "standard errors require at least two samples".into(),
            ));
        }
        if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::Invariant(format!(
                "non-finite sample value {bad} reached the estimator"
            )));
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
        let stderr = (ss / ((n - 1.0) * n)).sqrt();
        Ok(McEstimate {
            mean,
            stderr,
            n_samples: values.len(),
        })
    }

    /// Estimate of `c * X` for a deterministic factor `c`.
    pub fn scaled(&self, c: f64) -> McEstimate {
        McEstimate {
            mean: c * self.mean,
            stderr: c.abs() * self.stderr,
            n_samples: self.n_samples,
        }
    }

    /// Delta-method estimate of the product of two independent estimates.
    pub fn product(&self, other: &McEstimate) -> McEstimate {
        let mean = self.mean * other.mean;
        let stderr = (self.mean * self.mean * other.stderr * other.stderr
            + other.mean * other.mean * self.stderr * self.stderr)
            .sqrt();
        McEstimate {
            mean,
            stderr,
            n_samples: self.n_samples.min(other.n_samples),
        }
    }
}

/// Estimates `E f(stream)` over `n_samples` independent substreams.
pub fn estimate_expectation<F>(
    n_samples: usize,
    master_seed: u64,
    plan: StreamPlan,
    workers: Option<usize>,
    f: F,
) -> Result<McEstimate>
where
    F: Fn(&mut RngStream) -> f64 + Sync,
{
    let values = collect_samples(n_samples, master_seed, plan, workers, f)?;
    McEstimate::from_samples(&values)
}

/// Outcome of comparing an estimated left side against an estimated right
/// side that should dominate it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerdictStatus {
    /// Left mean at or below right mean.
    Consistent,
    /// Left mean above right mean, but within joint noise at the z policy.
    Inconclusive,
    /// Left exceeds right by more than the z policy allows on both sides.
    Violated,
}

impl std::fmt::Display for VerdictStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            VerdictStatus::Consistent => "CONSISTENT",
            VerdictStatus::Inconclusive => "INCONCLUSIVE",
            VerdictStatus::Violated => "VIOLATED",
        };
        write!(f, "{s}")
    }
}

/// Verdict with the signed noise-normalized margin `(rhs - lhs) / joint se`;
/// positive margins mean the claimed inequality holds with room.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Verdict {
    pub status: VerdictStatus,
    pub z_margin: f64,
}

/// Compares the estimates of `E lhs <= E rhs` at separation policy `z`.
///
/// VIOLATED requires the lower `z`-edge of the left side to clear the upper
/// `z`-edge of the right side, so it is an honest multi-sigma claim, not a
/// point comparison.
pub fn compare_estimates(lhs: &McEstimate, rhs: &McEstimate, z: f64) -> Verdict {
    let joint = (lhs.stderr * lhs.stderr + rhs.stderr * rhs.stderr).sqrt();
    let z_margin = if joint == 0.0 {
        match rhs.mean - lhs.mean {
            d if d > 0.0 => f64::INFINITY,
            d if d < 0.0 => f64::NEG_INFINITY,
            _ => 0.0,
        }
    } else {
        (rhs.mean - lhs.mean) / joint
    };
    let status = if lhs.mean - z * lhs.stderr > rhs.mean + z * rhs.stderr {
        VerdictStatus::Violated
    } else if lhs.mean > rhs.mean {
        VerdictStatus::Inconclusive
    } else {
        VerdictStatus::Consistent
    };
    Verdict { status, z_margin }
}

/// Full record of one two-sided comparison experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonReport {
    /// Which experiment produced the row (matches the CLI subcommand).
    pub experiment: String,
    pub dims: crate::matrix::Dims,
    /// Norm column for the report; `None` renders empty.
    pub norm: Option<crate::functionals::NormSpec>,
    /// Free-form qualifier column (scalar transform, functional description,
    /// or auxiliary-statistic label depending on the experiment).
    pub phi: Option<String>,
    /// The deterministic (or realized, for estimated-multiplier experiments)
    /// factor applied to the right side; recorded, never recomputed.
    pub factor: f64,
    pub lhs: McEstimate,
    pub rhs: McEstimate,
    pub verdict: Verdict,
    pub seed: u64,
    pub n_samples: usize,
    /// Wall-clock duration; informational only, never written to report files.
    pub wall_time: std::time::Duration,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn estimator_matches_hand_computation() {
        let est = McEstimate::from_samples(&[1.0, 2.0, 3.0, 6.0]).unwrap();
        assert!((est.mean - 3.0).abs() < 1e-15);
        // Sample variance = (4 + 1 + 0 + 9) / 3; stderr = sqrt(var / 4).
        let expected = (14.0f64 / 3.0 / 4.0).sqrt();
        assert!((est.stderr - expected).abs() < 1e-15);
        assert!(McEstimate::from_samples(&[1.0]).is_err());
        assert!(McEstimate::from_samples(&[1.0, f64::NAN]).is_err());
    }

    #[test]
    fn estimate_is_bitwise_identical_across_worker_counts() {
        let f = |s: &mut RngStream| {
            let x = s.standard_normal();
            let y = s.standard_normal();
            (x * x + y * y).sqrt()
        };
        let base = estimate_expectation(500, 9, PLAN_SINGLE, Some(1), f).unwrap();
        for workers in [2usize, 8] {
            let other = estimate_expectation(500, 9, PLAN_SINGLE, Some(workers), f).unwrap();
            assert_eq!(base.mean.to_bits(), other.mean.to_bits());
            assert_eq!(base.stderr.to_bits(), other.stderr.to_bits());
        }
    }

    #[test]
    fn paired_plans_are_disjoint() {
        for i in 0..100 {
            let l = PLAN_LHS.index(i);
            let r = PLAN_RHS.index(i);
            assert_eq!(l % 2, 0);
            assert_eq!(r % 2, 1);
        }
    }

    #[test]
    fn verdict_logic_worked_examples() {
        let lhs = McEstimate { mean: 1.00, stderr: 0.05, n_samples: 100 };
        let rhs = McEstimate { mean: 0.99, stderr: 0.05, n_samples: 100 };
        // Point violation only: inconclusive at z = 3.
        let v = compare_estimates(&lhs, &rhs, 3.0);
        assert_eq!(v.status, VerdictStatus::Inconclusive);
        assert!(v.z_margin < 0.0);

        let rhs_far = McEstimate { mean: 0.5, stderr: 0.05, n_samples: 100 };
        assert_eq!(
            compare_estimates(&lhs, &rhs_far, 3.0).status,
            VerdictStatus::Violated
        );

        let rhs_above = McEstimate { mean: 1.2, stderr: 0.05, n_samples: 100 };
        let v = compare_estimates(&lhs, &rhs_above, 3.0);
        assert_eq!(v.status, VerdictStatus::Consistent);
        assert!(v.z_margin > 0.0);

        // Exact zero-noise ties are consistent with zero margin.
        let exact = McEstimate { mean: 1.0, stderr: 0.0, n_samples: 10 };
        let v = compare_estimates(&exact, &exact.clone(), 3.0);
        assert_eq!(v.status, VerdictStatus::Consistent);
        assert_eq!(v.z_margin, 0.0);
    }

    #[test]
    fn verdict_margin_increases_with_rhs_factor() {
        // For nonnegative means, scaling the right side up can only help.
        let lhs = McEstimate { mean: 0.9, stderr: 0.03, n_samples: 50 };
        let rhs = McEstimate { mean: 0.8, stderr: 0.04, n_samples: 50 };
        let mut prev = f64::NEG_INFINITY;
        for step in 0..40 {
            let c = 0.5 + step as f64 * 0.05;
            let margin = compare_estimates(&lhs, &rhs.scaled(c), 3.0).z_margin;
            assert!(margin >= prev, "margin not monotone at factor {c}");
            prev = margin;
        }
    }

    #[test]
    fn product_estimate_delta_method() {
        let a = McEstimate { mean: 2.0, stderr: 0.1, n_samples: 100 };
        let b = McEstimate { mean: 5.0, stderr: 0.2, n_samples: 100 };
        let p = a.product(&b);
        assert!((p.mean - 10.0).abs() < 1e-15);
        let expected = (4.0f64 * 0.04 + 25.0 * 0.01).sqrt();
        assert!((p.stderr - expected).abs() < 1e-15);
    }

    #[test]
    fn settings_validation() {
        assert!(RunSettings::new(1, 0).validate().is_err());
        assert!(RunSettings::new(100, 0).with_z(0.0).validate().is_err());
        assert!(RunSettings::new(100, 0).with_workers(Some(0)).validate().is_err());
        assert!(RunSettings::new(100, 0).validate().is_ok());
    }
}
