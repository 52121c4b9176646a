//! The experiment drivers: each function estimates both sides of one
//! comparison inequality and returns a report with a noise-aware verdict.

use std::time::Instant;

use crate::constants::{alpha_exact, chi_mean};
use crate::error::{Error, Result};
use crate::factorizations::{sample_bartlett_r, sample_wishart_root};
use crate::functionals::{
    assemble_sum, restrict_scale, spectral_norm, NormSpec, PhiSpec, VectorNorm,
};
use crate::matrix::{DenseMatrix, Dims};
use crate::sampling::{
    derive_substream, sample_haar_stiefel, sample_normalized_gaussian, sample_standard_gaussian,
};

use super::{
    compare_estimates, collect_samples, estimate_expectation, ComparisonReport, McEstimate,
    RunSettings, StreamPlan, PLAN_LHS, PLAN_RHS,
};

/// The frame-versus-Gaussian comparison: is `E phi(norm(Q))` bounded by
/// `E phi(factor * norm(G))`, with the default factor `1 + k/(2n)`?
///
/// `restrict_rows` compares the row-restricted, rescaled ensembles instead;
/// `factor_override` replaces the theorem factor (useful for injecting a
/// deliberately wrong constant to confirm the harness can detect violations).
pub fn run_sublinear_comparison(
    dims: Dims,
    norm: NormSpec,
    phi: PhiSpec,
    restrict_rows: Option<usize>,
    factor_override: Option<f64>,
    settings: RunSettings,
) -> Result<ComparisonReport> {
    settings.validate()?;
    if let Some(j) = restrict_rows {
        if j == 0 || j > dims.n() {
            return Err(Error::InvalidArgument(format!(
                "row restriction needs 1 <= j <= {}, got {j}",
                dims.n()
            )));
        }
    }
    if let Some(f) = factor_override {
        if !f.is_finite() || f <= 0.0 {
            return Err(Error::InvalidArgument(format!(
                "factor override must be a positive number, got {f}"
            )));
        }
    }
    let start = Instant::now();
    let factor = factor_override.unwrap_or(1.0 + dims.aspect_ratio() / 2.0);

    let eval = |m: &DenseMatrix, scale: f64| -> f64 {
        match restrict_rows {
            None => phi.eval(scale * norm.eval(m)),
            Some(j) => {
                let sub = restrict_scale(m, j).expect("validated above");
                phi.eval(scale * norm.eval(&sub))
            }
        }
    };

    let lhs = estimate_expectation(settings.n_samples, settings.seed, PLAN_LHS, settings.workers, |s| {
        eval(sample_haar_stiefel(dims, s).matrix(), 1.0)
    })?;
    let rhs = estimate_expectation(settings.n_samples, settings.seed, PLAN_RHS, settings.workers, |s| {
        eval(&sample_normalized_gaussian(dims, s), factor)
    })?;
    let verdict = compare_estimates(&lhs, &rhs, settings.z_policy);
    Ok(ComparisonReport {
        experiment: "theorem1".into(),
        dims,
        norm: Some(norm),
        phi: Some(phi.to_string()),
        factor,
        lhs,
        rhs,
        verdict,
        seed: settings.seed,
        n_samples: settings.n_samples,
        wall_time: start.elapsed(),
    })
}

/// The default verification grid: five shapes crossed with three norms and
/// three scalar transforms.
pub fn default_grid() -> Vec<(Dims, NormSpec, PhiSpec)> {
    let shapes = [(8, 2), (16, 4), (16, 16), (64, 16), (64, 64)];
    let norms = [NormSpec::Spectral, NormSpec::Frobenius, NormSpec::MaxEntry];
    let phis = [
        PhiSpec::identity(),
        PhiSpec::hinge(1.0).expect("valid threshold"),
        PhiSpec::power(2.0).expect("valid exponent"),
    ];
    let mut grid = Vec::new();
    for (n, k) in shapes {
        let dims = Dims::new(n, k).expect("grid shapes are valid");
        for norm in norms {
            for phi in phis {
                grid.push((dims, norm, phi));
            }
        }
    }
    grid
}

/// Runs [`run_sublinear_comparison`] over the whole default grid.
pub fn run_sublinear_grid(settings: RunSettings) -> Result<Vec<ComparisonReport>> {
    default_grid()
        .into_iter()
        .map(|(dims, norm, phi)| {
            run_sublinear_comparison(dims, norm, phi, None, None, settings)
        })
        .collect()
}

/// A functional from the convex-comparison catalog, together with its
/// curvature certificates.
#[derive(Debug, Clone, PartialEq)]
pub enum ConvexFunctional {
    /// `phi(norm(M))`: convex because the transform is increasing convex.
    PhiNorm { phi: PhiSpec, norm: NormSpec },
    /// `offset + slope * norm(M)`: convex for `slope >= 0`, concave for
    /// `slope <= 0`.
    AffineNorm {
        offset: f64,
        slope: f64,
        norm: NormSpec,
    },
    /// The linear functional `M[row, col]`: both convex and concave.
    Entry { row: usize, col: usize },
    /// Negation, which swaps the curvature certificates.
    Negated(Box<ConvexFunctional>),
}

impl ConvexFunctional {
    pub fn eval(&self, m: &DenseMatrix) -> f64 {
        match self {
            ConvexFunctional::PhiNorm { phi, norm } => phi.eval(norm.eval(m)),
            ConvexFunctional::AffineNorm { offset, slope, norm } => offset + slope * norm.eval(m),
            ConvexFunctional::Entry { row, col } => m.get(*row, *col),
            ConvexFunctional::Negated(inner) => -inner.eval(m),
        }
    }

    pub fn is_convex(&self) -> bool {
        match self {
            ConvexFunctional::PhiNorm { .. } => true,
            ConvexFunctional::AffineNorm { slope, .. } => *slope >= 0.0,
            ConvexFunctional::Entry { .. } => true,
            ConvexFunctional::Negated(inner) => inner.is_concave(),
        }
    }

    pub fn is_concave(&self) -> bool {
        match self {
            ConvexFunctional::PhiNorm { .. } => false,
            ConvexFunctional::AffineNorm { slope, .. } => *slope <= 0.0,
            ConvexFunctional::Entry { .. } => true,
            ConvexFunctional::Negated(inner) => inner.is_convex(),
        }
    }

    fn validate(&self, dims: Dims) -> Result<()> {
        match self {
            ConvexFunctional::PhiNorm { .. } => Ok(()),
            ConvexFunctional::AffineNorm { offset, slope, .. } => {
                if offset.is_finite() && slope.is_finite() {
                    Ok(())
                } else {
                    Err(Error::InvalidArgument(
                        "affine coefficients must be finite".into(),
                    ))
                }
            }
            ConvexFunctional::Entry { row, col } => {
                if *row < dims.n() && *col < dims.k() {
                    Ok(())
                } else {
                    Err(Error::InvalidArgument(format!(
                        "entry ({row},{col}) is outside a {} matrix",
                        dims
                    )))
                }
            }
            ConvexFunctional::Negated(inner) => inner.validate(dims),
        }
    }
}

impl std::fmt::Display for ConvexFunctional {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ConvexFunctional::PhiNorm { phi, norm } => write!(f, "{phi}∘{norm}"),
            ConvexFunctional::AffineNorm { offset, slope, norm } => {
                write!(f, "affine({offset}+{slope}*{norm})")
            }
            ConvexFunctional::Entry { row, col } => write!(f, "entry({row},{col})"),
            ConvexFunctional::Negated(inner) => write!(f, "neg({inner})"),
        }
    }
}

/// Which direction of the exact-constant comparison to verify.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    /// `E f(Q) <= E f(G / alpha)` for convex `f`.
    Convex,
    /// `E f(G / alpha) <= E f(Q)` for concave `f`.
    Concave,
}

impl std::str::FromStr for Sense {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "convex" => Ok(Sense::Convex),
            "concave" => Ok(Sense::Concave),
            other => Err(Error::Config(format!(
                "unknown sense '{other}' (expected convex or concave)"
            ))),
        }
    }
}

/// The exact-constant comparison: a frame against a standard Gaussian matrix
/// scaled by `1 / alpha(k, n)`, in the direction matching the functional's
/// curvature.
pub fn run_convex_comparison(
    dims: Dims,
    functional: &ConvexFunctional,
    sense: Sense,
    settings: RunSettings,
) -> Result<ComparisonReport> {
    settings.validate()?;
    functional.validate(dims)?;
    match sense {
        Sense::Convex if !functional.is_convex() => {
            return Err(Error::Config(format!(
                "functional {functional} carries no convexity certificate"
            )))
        }
        Sense::Concave if !functional.is_concave() => {
            return Err(Error::Config(format!(
                "functional {functional} carries no concavity certificate"
            )))
        }
        _ => {}
    }
    let start = Instant::now();
    let alpha = alpha_exact(dims.k(), dims.n())?;
    let inv_alpha = 1.0 / alpha;

    let frame_side = estimate_expectation(
        settings.n_samples,
        settings.seed,
        PLAN_LHS,
        settings.workers,
        |s| functional.eval(sample_haar_stiefel(dims, s).matrix()),
    )?;
    let gauss_side = estimate_expectation(
        settings.n_samples,
        settings.seed,
        PLAN_RHS,
        settings.workers,
        |s| functional.eval(&sample_standard_gaussian(dims, s).scaled(inv_alpha)),
    )?;
    let (lhs, rhs) = match sense {
        Sense::Convex => (frame_side, gauss_side),
        Sense::Concave => (gauss_side, frame_side),
    };
    let verdict = compare_estimates(&lhs, &rhs, settings.z_policy);
    Ok(ComparisonReport {
        experiment: "convex".into(),
        dims,
        norm: None,
        phi: Some(format!("{functional}[{}]", match sense {
            Sense::Convex => "convex",
            Sense::Concave => "concave",
        })),
        factor: inv_alpha,
        lhs,
        rhs,
        verdict,
        seed: settings.seed,
        n_samples: settings.n_samples,
        wall_time: start.elapsed(),
    })
}

/// The matrix-series comparison: `E phi(norm(sum_j Q_j A_j))` against
/// `E phi(3/2 * norm(sum_j G_j A_j))` with independent square frames `Q_j`
/// and independent normalized Gaussian matrices `G_j`.
pub fn run_ncgauss(
    n: usize,
    coefficients: &[DenseMatrix],
    norm: NormSpec,
    phi: PhiSpec,
    settings: RunSettings,
) -> Result<ComparisonReport> {
    settings.validate()?;
    let dims = Dims::new(n, n)?;
    if coefficients.is_empty() {
        return Err(Error::InvalidArgument(
            "the series needs at least one coefficient matrix".into(),
        ));
    }
    for (j, a) in coefficients.iter().enumerate() {
        if a.rows() != n || a.cols() != n {
            return Err(Error::ShapeMismatch(format!(
                "coefficient {j} is {}x{}, expected {n}x{n}",
                a.rows(),
                a.cols()
            )));
        }
    }
    let start = Instant::now();
    let factor = 1.5;

    let lhs = estimate_expectation(settings.n_samples, settings.seed, PLAN_LHS, settings.workers, |s| {
        let frames: Vec<DenseMatrix> = coefficients
            .iter()
            .map(|_| sample_haar_stiefel(dims, s).into_matrix())
            .collect();
        let total = assemble_sum(&frames, coefficients).expect("shapes validated");
        phi.eval(norm.eval(&total))
    })?;
    let rhs = estimate_expectation(settings.n_samples, settings.seed, PLAN_RHS, settings.workers, |s| {
        let gaussians: Vec<DenseMatrix> = coefficients
            .iter()
            .map(|_| sample_normalized_gaussian(dims, s))
            .collect();
        let total = assemble_sum(&gaussians, coefficients).expect("shapes validated");
        phi.eval(factor * norm.eval(&total))
    })?;
    let verdict = compare_estimates(&lhs, &rhs, settings.z_policy);
    Ok(ComparisonReport {
        experiment: "ncgauss".into(),
        dims,
        norm: Some(norm),
        phi: Some(format!("{phi}[J={}]", coefficients.len())),
        factor,
        lhs,
        rhs,
        verdict,
        seed: settings.seed,
        n_samples: settings.n_samples,
        wall_time: start.elapsed(),
    })
}

/// The reversed comparison for right-ideal norms: `E norm(G)` against
/// `(1 + sqrt(k/n)) * E norm(Q)`.
///
/// Also spot-checks the right-ideal property `norm(A B) <= norm(A) * ||B||`
/// on random pairs before trusting the norm with this comparison.
pub fn run_converse1(dims: Dims, norm: NormSpec, settings: RunSettings) -> Result<ComparisonReport> {
    settings.validate()?;
    if !norm.is_right_ideal() {
        return Err(Error::Config(format!(
            "norm {norm} is not flagged compatible with right multiplication; \
             this comparison needs spectral or frobenius"
        )));
    }
    let start = Instant::now();

    // Ideal-property spot check on substreams beyond the estimation range.
    let base = 2 * settings.n_samples as u64;
    for t in 0..8 {
        let mut stream = derive_substream(settings.seed, base + t);
        let a = sample_standard_gaussian(dims, &mut stream);
        let b = sample_standard_gaussian(Dims::new(dims.k(), dims.k())?, &mut stream);
        let product = a.matmul(&b)?;
        let lhs = norm.eval(&product);
        let rhs = norm.eval(&a) * spectral_norm(&b);
        if lhs > rhs * (1.0 + 1e-11) + 1e-11 {
            return Err(Error::Invariant(format!(
                "right-ideal property failed for {norm}: {lhs} > {rhs}"
            )));
        }
    }

    let lhs = estimate_expectation(settings.n_samples, settings.seed, PLAN_LHS, settings.workers, |s| {
        norm.eval(&sample_normalized_gaussian(dims, s))
    })?;
    let frame_est = estimate_expectation(
        settings.n_samples,
        settings.seed,
        PLAN_RHS,
        settings.workers,
        |s| norm.eval(sample_haar_stiefel(dims, s).matrix()),
    )?;
    let factor = 1.0 + dims.aspect_ratio().sqrt();
    let rhs = frame_est.scaled(factor);
    let verdict = compare_estimates(&lhs, &rhs, settings.z_policy);
    Ok(ComparisonReport {
        experiment: "converse1".into(),
        dims,
        norm: Some(norm),
        phi: None,
        factor,
        lhs,
        rhs,
        verdict,
        seed: settings.seed,
        n_samples: settings.n_samples,
        wall_time: start.elapsed(),
    })
}

/// Choice of the auxiliary square factor whose expected norm multiplies the
/// frame side in [`run_converse2`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AuxiliaryFactor {
    /// Triangular factor of a standard Gaussian matrix.
    BartlettR,
    /// Symmetric square root of the Gaussian Gram matrix.
    WishartW,
}

impl std::fmt::Display for AuxiliaryFactor {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            AuxiliaryFactor::BartlettR => write!(f, "bartlett_r"),
            AuxiliaryFactor::WishartW => write!(f, "wishart_w"),
        }
    }
}

impl std::str::FromStr for AuxiliaryFactor {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bartlett_r" | "r" => Ok(AuxiliaryFactor::BartlettR),
            "wishart_w" | "w" => Ok(AuxiliaryFactor::WishartW),
            other => Err(Error::Config(format!(
                "unknown auxiliary factor '{other}' (expected bartlett_r or wishart_w)"
            ))),
        }
    }
}

const PLAN_TRIPLE_A: StreamPlan = StreamPlan { offset: 0, stride: 3 };
const PLAN_TRIPLE_B: StreamPlan = StreamPlan { offset: 1, stride: 3 };
const PLAN_TRIPLE_C: StreamPlan = StreamPlan { offset: 2, stride: 3 };

/// The operator-norm converse comparison:
/// `E ||G||_{Y->Z} <= (E ||T||_{Y->Y} / sqrt(n)) * E ||Q||_{Y->Z}`,
/// where `T` is the chosen auxiliary factor of a standard Gaussian matrix.
/// The right side multiplies two independent estimates; its standard error
/// uses the delta method.
pub fn run_converse2(
    dims: Dims,
    domain: VectorNorm,
    codomain: VectorNorm,
    auxiliary: AuxiliaryFactor,
    settings: RunSettings,
) -> Result<ComparisonReport> {
    settings.validate()?;
    let norm_yz = NormSpec::operator(domain, codomain)?;
    let norm_yy = NormSpec::operator(domain, domain)?;
    let start = Instant::now();

    let lhs = estimate_expectation(
        settings.n_samples,
        settings.seed,
        PLAN_TRIPLE_A,
        settings.workers,
        |s| norm_yz.eval(&sample_normalized_gaussian(dims, s)),
    )?;
    let aux_est = estimate_expectation(
        settings.n_samples,
        settings.seed,
        PLAN_TRIPLE_B,
        settings.workers,
        |s| match auxiliary {
            AuxiliaryFactor::BartlettR => norm_yy.eval(&sample_bartlett_r(dims, s).to_dense()),
            AuxiliaryFactor::WishartW => norm_yy.eval(sample_wishart_root(dims, s).matrix()),
        },
    )?;
    let frame_est = estimate_expectation(
        settings.n_samples,
        settings.seed,
        PLAN_TRIPLE_C,
        settings.workers,
        |s| norm_yz.eval(sample_haar_stiefel(dims, s).matrix()),
    )?;
    let scaled_aux = aux_est.scaled(1.0 / (dims.n() as f64).sqrt());
    let rhs = scaled_aux.product(&frame_est);
    let verdict = compare_estimates(&lhs, &rhs, settings.z_policy);
    Ok(ComparisonReport {
        experiment: "converse2".into(),
        dims,
        norm: Some(norm_yz),
        phi: Some(format!("t={auxiliary}")),
        factor: scaled_aux.mean,
        lhs,
        rhs,
        verdict,
        seed: settings.seed,
        n_samples: settings.n_samples,
        wall_time: start.elapsed(),
    })
}

/// One row of the largest-entry study.
#[derive(Debug, Clone, PartialEq)]
pub struct MaxEntryRow {
    pub n: usize,
    pub estimate: McEstimate,
    /// The closed-form bound `3 * sqrt((ln n + 1/4) / n)`.
    pub bound: f64,
    /// `estimate * sqrt(n / ln n)`, the scale on which the statistic settles.
    pub normalized: f64,
}

/// Estimates the expected largest absolute entry of a square `n x n` frame
/// for each requested `n` and checks it against the closed-form bound.
pub fn run_maxentry_study(n_list: &[usize], settings: RunSettings) -> Result<Vec<MaxEntryRow>> {
    settings.validate()?;
    if n_list.is_empty() {
        return Err(Error::InvalidArgument("need at least one matrix size".into()));
    }
    for &n in n_list {
        if n < 2 {
            return Err(Error::InvalidArgument(format!(
                "largest-entry study needs n >= 2, got {n}"
            )));
        }
    }
    let mut rows = Vec::with_capacity(n_list.len());
    for (t, &n) in n_list.iter().enumerate() {
        let dims = Dims::new(n, n)?;
        let plan = StreamPlan {
            offset: (t * settings.n_samples) as u64,
            stride: 1,
        };
        let estimate = estimate_expectation(
            settings.n_samples,
            settings.seed,
            plan,
            settings.workers,
            |s| sample_haar_stiefel(dims, s).matrix().max_abs_entry(),
        )?;
        let nf = n as f64;
        let bound = 3.0 * ((nf.ln() + 0.25) / nf).sqrt();
        if estimate.mean > bound {
            return Err(Error::Invariant(format!(
                "largest-entry estimate {} exceeds the bound {bound} at n={n}",
                estimate.mean
            )));
        }
        rows.push(MaxEntryRow {
            n,
            estimate,
            bound,
            normalized: estimate.mean * (nf / nf.ln()).sqrt(),
        });
    }
    Ok(rows)
}

/// Outcome of the no-lower-bound demonstration.
#[derive(Debug, Clone, PartialEq)]
pub struct CounterexampleReport {
    pub dims: Dims,
    pub beta: f64,
    /// `E hinge_1(beta * ||G||)` over normalized Gaussian matrices.
    pub gaussian_side: McEstimate,
    /// `E hinge_1(||Q||)` over frames; exactly zero in exact arithmetic
    /// because a frame's spectral norm is exactly one.
    pub frame_side: McEstimate,
    /// Fraction of frame samples whose functional value was exactly 0.0.
    pub frame_zero_fraction: f64,
    /// Whether the Gaussian side is strictly positive at the z policy while
    /// the frame side vanishes to rounding error.
    pub demonstrated: bool,
    pub seed: u64,
    pub n_samples: usize,
    pub wall_time: std::time::Duration,
}

/// Shows that no reversed bound `E phi(norm(Q)) >= c * E phi(beta * norm(G))`
/// can hold: with the hinge at one, the frame side is identically zero while
/// the Gaussian side stays strictly positive for any `beta >= 1`.
pub fn run_counterexample(
    dims: Dims,
    beta: f64,
    settings: RunSettings,
) -> Result<CounterexampleReport> {
    settings.validate()?;
    if !beta.is_finite() || beta <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "beta must be a positive number, got {beta}"
        )));
    }
    let start = Instant::now();
    let phi = PhiSpec::hinge(1.0).expect("valid threshold");

    let gaussian_side = estimate_expectation(
        settings.n_samples,
        settings.seed,
        PLAN_LHS,
        settings.workers,
        |s| phi.eval(beta * spectral_norm(&sample_normalized_gaussian(dims, s))),
    )?;
    let frame_values = collect_samples(
        settings.n_samples,
        settings.seed,
        PLAN_RHS,
        settings.workers,
        |s| phi.eval(spectral_norm(sample_haar_stiefel(dims, s).matrix())),
    )?;
    let frame_side = McEstimate::from_samples(&frame_values)?;
    let zero_count = frame_values.iter().filter(|&&v| v == 0.0).count();
    let frame_zero_fraction = zero_count as f64 / frame_values.len() as f64;
    let demonstrated = gaussian_side.mean - settings.z_policy * gaussian_side.stderr > 0.0
        && frame_side.mean <= 1e-12;
    Ok(CounterexampleReport {
        dims,
        beta,
        gaussian_side,
        frame_side,
        frame_zero_fraction,
        demonstrated,
        seed: settings.seed,
        n_samples: settings.n_samples,
        wall_time: start.elapsed(),
    })
}

/// Exact expected chi norms used by the closed-form cross-checks in tests and
/// examples: the Frobenius norm of an `n x k` standard Gaussian matrix is chi
/// distributed on `n*k` degrees of freedom.
pub fn gaussian_frobenius_mean(dims: Dims) -> f64 {
    chi_mean((dims.n() * dims.k()) as u64).expect("positive dof")
}
