//! Distribution self-tests: statistical checks of the identities the
//! samplers and factorizations are supposed to satisfy, each reported as a
//! named check with its test statistic and threshold.
//!
//! Three families run against one shape:
//! 1. the triangular factor of a Gaussian matrix has independent chi diagonal
//!    entries and standard normal super-diagonal entries;
//! 2. frame statistics are invariant under a fixed rotation of the ambient
//!    space;
//! 3. averaging permutation-conjugated triangular factors recovers the
//!    comparison constant times the identity.

use std::time::Instant;

use crate::constants::{alpha_exact, chi_mean};
use crate::error::Result;
use crate::factorizations::{qr_positive_diagonal, sample_bartlett_r};
use crate::matrix::Dims;
use crate::sampling::{
    derive_substream, sample_haar_stiefel, sample_standard_gaussian, sample_uniform_permutation,
};

use super::{collect_samples, McEstimate, RunSettings, StreamPlan};

/// One named statistical check.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: String,
    /// The realized test statistic (a |z| score unless noted in the name).
    pub statistic: f64,
    /// Pass when `statistic <= threshold`.
    pub threshold: f64,
    pub passed: bool,
}

impl CheckResult {
    fn z_test(name: String, z: f64, threshold: f64) -> Self {
        CheckResult {
            name,
            statistic: z.abs(),
            threshold,
            passed: z.abs() <= threshold,
        }
    }
}

/// Results of the full self-test battery.
#[derive(Debug, Clone, PartialEq)]
pub struct SelfTestReport {
    pub dims: Dims,
    pub seed: u64,
    pub n_samples: usize,
    pub checks: Vec<CheckResult>,
    pub wall_time: std::time::Duration,
}

impl SelfTestReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failed_checks(&self) -> Vec<&CheckResult> {
        self.checks.iter().filter(|c| !c.passed).collect()
    }
}

/// Entrywise mean/standard-error/variance summary over a sample of matrices.
struct EntryStats {
    k: usize,
    mean: Vec<f64>,
    stderr: Vec<f64>,
    variance: Vec<f64>,
}

fn entry_stats(samples: &[Vec<f64>], k: usize) -> EntryStats {
    let n = samples.len() as f64;
    let mut mean = vec![0.0; k * k];
    for s in samples {
        for (m, v) in mean.iter_mut().zip(s) {
            *m += v;
        }
    }
    mean.iter_mut().for_each(|m| *m /= n);
    let mut ss = vec![0.0; k * k];
    for s in samples {
        for ((acc, v), m) in ss.iter_mut().zip(s).zip(&mean) {
            let d = v - m;
            *acc += d * d;
        }
    }
    let variance: Vec<f64> = ss.iter().map(|&s| s / (n - 1.0)).collect();
    let stderr: Vec<f64> = variance.iter().map(|&v| (v / n).sqrt()).collect();
    EntryStats {
        k,
        mean,
        stderr,
        variance,
    }
}

impl EntryStats {
    fn at(&self, i: usize, j: usize) -> (f64, f64, f64) {
        let idx = i * self.k + j;
        (self.mean[idx], self.stderr[idx], self.variance[idx])
    }
}

/// Runs the full battery against one shape. Every check is recorded; the
/// report aggregates pass/fail.
pub fn run_distribution_selftests(dims: Dims, settings: RunSettings) -> Result<SelfTestReport> {
    settings.validate()?;
    let start = Instant::now();
    let (n, k) = (dims.n(), dims.k());
    let n_samples = settings.n_samples;
    let block = n_samples as u64;
    let mut checks = Vec::new();

    // Family 1: the law of the QR triangular factor of a Gaussian matrix.
    let r_samples: Vec<Vec<f64>> = collect_samples(
        n_samples,
        settings.seed,
        StreamPlan { offset: 0, stride: 1 },
        settings.workers,
        |s| {
            let g = sample_standard_gaussian(dims, s);
            let (_, r) = qr_positive_diagonal(&g).expect("Gaussian input has full rank");
            let mut flat = vec![0.0; k * k];
            for i in 0..k {
                for j in i..k {
                    flat[i * k + j] = r.get(i, j);
                }
            }
            flat
        },
    )?;
    let r_stats = entry_stats(&r_samples, k);
    for i in 0..k {
        let (mean, se, _) = r_stats.at(i, i);
        let exact = chi_mean((n - i) as u64)?;
        checks.push(CheckResult::z_test(
            format!("qr_diag_mean[{i}] vs chi_mean({})", n - i),
            (mean - exact) / se,
            3.0,
        ));
        for j in i + 1..k {
            let (mean, se, var) = r_stats.at(i, j);
            checks.push(CheckResult::z_test(
                format!("qr_upper_mean[{i},{j}] vs 0"),
                mean / se,
                3.0,
            ));
            checks.push(CheckResult {
                name: format!("qr_upper_var[{i},{j}] vs 1 (rel dev)"),
                statistic: (var - 1.0).abs(),
                threshold: 0.05,
                passed: (var - 1.0).abs() <= 0.05,
            });
        }
    }

    // Family 2: rotation invariance of frame statistics. Two independent
    // ensembles, one rotated by a fixed orthogonal matrix, must agree.
    let rotation = sample_haar_stiefel(
        Dims::new(n, n)?,
        &mut derive_substream(settings.seed, 4 * block),
    )
    .into_matrix();
    let plain: Vec<(f64, f64)> = collect_samples(
        n_samples,
        settings.seed,
        StreamPlan { offset: block, stride: 1 },
        settings.workers,
        |s| {
            let q = sample_haar_stiefel(dims, s).into_matrix();
            (q.max_abs_entry(), q.get(0, 0).abs())
        },
    )?;
    let rotated: Vec<(f64, f64)> = collect_samples(
        n_samples,
        settings.seed,
        StreamPlan { offset: 2 * block, stride: 1 },
        settings.workers,
        |s| {
            let q = sample_haar_stiefel(dims, s).into_matrix();
            let uq = rotation.matmul(&q).expect("shapes agree");
            (uq.max_abs_entry(), uq.get(0, 0).abs())
        },
    )?;
    for (label, pick) in [
        ("max_entry", 0usize),
        ("corner_entry_abs", 1usize),
    ] {
        let a: Vec<f64> = plain
            .iter()
            .map(|t| if pick == 0 { t.0 } else { t.1 })
            .collect();
        let b: Vec<f64> = rotated
            .iter()
            .map(|t| if pick == 0 { t.0 } else { t.1 })
            .collect();
        let ea = McEstimate::from_samples(&a)?;
        let eb = McEstimate::from_samples(&b)?;
        let joint = (ea.stderr * ea.stderr + eb.stderr * eb.stderr).sqrt();
        checks.push(CheckResult::z_test(
            format!("rotation_invariance[{label}]"),
            (ea.mean - eb.mean) / joint,
            3.0,
        ));
    }

    // Family 3: permutation symmetrization of the triangular factor averages
    // to the comparison constant times the identity.
    let conj_samples: Vec<Vec<f64>> = collect_samples(
        n_samples,
        settings.seed,
        StreamPlan { offset: 3 * block, stride: 1 },
        settings.workers,
        |s| {
            let r = sample_bartlett_r(dims, s);
            let perm = sample_uniform_permutation(k, s);
            let conj = perm
                .conjugate(&r.to_dense())
                .expect("shapes agree");
            conj.as_slice().to_vec()
        },
    )?;
    let conj_stats = entry_stats(&conj_samples, k);
    let alpha = alpha_exact(k, n)?;
    for i in 0..k {
        for j in 0..k {
            let (mean, se, _) = conj_stats.at(i, j);
            let target = if i == j { alpha } else { 0.0 };
            let name = if i == j {
                format!("perm_symmetrized_diag[{i}] vs alpha")
            } else {
                format!("perm_symmetrized_offdiag[{i},{j}] vs 0")
            };
            checks.push(CheckResult::z_test(name, (mean - target) / se, 3.0));
        }
    }

    Ok(SelfTestReport {
        dims,
        seed: settings.seed,
        n_samples,
        checks,
        wall_time: start.elapsed(),
    })
}
