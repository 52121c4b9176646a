//! Command-line front end: argument parsing, config-file merging, experiment
//! dispatch, and CSV/JSON report emission.
//!
//! Precedence for every setting: explicit flag, then config-file value, then
//! built-in default. Reports go to stdout (or `--output`); a human-readable
//! summary always goes to stderr so report bytes stay clean. Exit codes:
//! 0 for completed runs with no violations, 2 when any verdict is VIOLATED or
//! a self-test check fails, 1 for usage or runtime errors.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use crate::constants::{alpha_report, AlphaReport};
use crate::error::{Error, Result};
use crate::experiments::{
    run_convex_comparison, run_converse1, run_converse2, run_counterexample,
    run_distribution_selftests, run_maxentry_study, run_ncgauss, run_sublinear_comparison,
    run_sublinear_grid, AuxiliaryFactor, ComparisonReport, ConvexFunctional, CounterexampleReport,
    MaxEntryRow, RunSettings, SelfTestReport, Sense, VerdictStatus,
};
use crate::functionals::{NormSpec, PhiSpec, VectorNorm};
use crate::matrix::{DenseMatrix, Dims};

/// Environment variable that sets the worker-thread count when no flag or
/// config value does.
pub const WORKERS_ENV_VAR: &str = "STIEFEL_COMPARE_WORKERS";

const DEFAULT_SAMPLES: usize = 10_000;
const DEFAULT_SELFTEST_SAMPLES: usize = 100_000;

/// Process entry point: parses `std::env::args` and returns the exit code.
pub fn run() -> i32 {
    let args: Vec<String> = std::env::args().collect();
    run_from_args(&args)
}

/// Testable entry point taking explicit arguments (including program name).
pub fn run_from_args(args: &[String]) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

#[derive(Parser)]
#[command(
    name = "stiefel-compare",
    version,
    about = "Monte Carlo comparison of random orthonormal frames against scaled Gaussian matrices"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Frame vs Gaussian under a norm and transform; default factor 1 + k/(2n)
    Theorem1(Theorem1Args),
    /// Frame vs exactly rescaled Gaussian for convex/concave functionals
    Convex(ConvexArgs),
    /// Series of frames with coefficients vs the Gaussian series at factor 3/2
    Ncgauss(NcgaussArgs),
    /// Reversed comparison for right-ideal norms at factor 1 + sqrt(k/n)
    Converse1(Converse1Args),
    /// Reversed operator-norm comparison with an estimated multiplier
    Converse2(Converse2Args),
    /// Expected largest entry of square frames against the closed-form bound
    Maxentry(MaxentryArgs),
    /// Demonstrates that no reversed bound exists for hinge transforms
    Counterexample(CounterexampleArgs),
    /// Table of exact comparison constants and their two-sided bounds
    AlphaTable(AlphaTableArgs),
    /// Statistical self-tests of the sampler/factorization identities
    Selftest(SelftestArgs),
}

#[derive(Args, Clone)]
struct CommonArgs {
    /// Monte Carlo samples per estimate
    #[arg(long)]
    samples: Option<usize>,
    /// Master seed for all substreams
    #[arg(long)]
    seed: Option<u64>,
    /// Standard errors of separation required to call a violation
    #[arg(long)]
    z: Option<f64>,
    /// Worker threads (falls back to STIEFEL_COMPARE_WORKERS, then the global pool)
    #[arg(long)]
    workers: Option<usize>,
    /// JSON file supplying values for omitted flags
    #[arg(long)]
    config: Option<PathBuf>,
    /// Write the report to this file instead of stdout
    #[arg(long)]
    output: Option<PathBuf>,
    /// Report format
    #[arg(long, value_enum)]
    format: Option<OutputFormat>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Csv,
    Json,
}

#[derive(Args)]
struct Theorem1Args {
    /// Ambient dimension; omit both -n and -k to run the default grid
    #[arg(long)]
    n: Option<usize>,
    /// Frame size
    #[arg(long)]
    k: Option<usize>,
    /// Norm: spectral, frobenius, max_entry, or op_<from>_to_<to>
    #[arg(long)]
    norm: Option<String>,
    /// Scalar transform: identity, hinge(c), power(m), or exp(r)
    #[arg(long)]
    phi: Option<String>,
    /// Compare the ensembles restricted to this many leading rows (rescaled)
    #[arg(long)]
    submatrix_rows: Option<usize>,
    /// Replace the theorem factor (for validating violation detection)
    #[arg(long)]
    factor_override: Option<f64>,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct ConvexArgs {
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    /// Functional family: phi-norm, affine, or entry
    #[arg(long)]
    functional: Option<String>,
    /// Comparison direction: convex or concave
    #[arg(long)]
    sense: Option<String>,
    /// Norm for phi-norm/affine functionals
    #[arg(long)]
    norm: Option<String>,
    /// Transform for the phi-norm functional
    #[arg(long)]
    phi: Option<String>,
    /// Offset for the affine functional
    #[arg(long)]
    offset: Option<f64>,
    /// Slope for the affine functional
    #[arg(long)]
    slope: Option<f64>,
    /// Row index for the entry functional
    #[arg(long)]
    row: Option<usize>,
    /// Column index for the entry functional
    #[arg(long)]
    col: Option<usize>,
    /// Wrap the functional in a negation (swaps its curvature)
    #[arg(long)]
    negate: bool,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct NcgaussArgs {
    /// Matrix size (square); defaults to 8, or to the coefficient file's size
    #[arg(long)]
    n: Option<usize>,
    /// JSON file with the coefficient matrices; defaults to one identity
    #[arg(long)]
    coeff_file: Option<PathBuf>,
    #[arg(long)]
    norm: Option<String>,
    #[arg(long)]
    phi: Option<String>,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct Converse1Args {
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    /// Right-ideal norm: spectral or frobenius
    #[arg(long)]
    norm: Option<String>,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct Converse2Args {
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    /// Domain vector norm: l1, l2, or linf
    #[arg(long)]
    y_norm: Option<String>,
    /// Codomain vector norm: l1, l2, or linf
    #[arg(long)]
    z_norm: Option<String>,
    /// Auxiliary factor: bartlett_r or wishart_w
    #[arg(long)]
    t: Option<String>,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct MaxentryArgs {
    /// Comma-separated list of square sizes, e.g. 64,256
    #[arg(long)]
    n_list: Option<String>,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct CounterexampleArgs {
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    /// Gaussian-side scale; any beta >= 1 demonstrates the gap
    #[arg(long)]
    beta: Option<f64>,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct AlphaTableArgs {
    /// Emit one row per shape with 1 <= k <= n <= max_n
    #[arg(long)]
    max_n: Option<usize>,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct SelftestArgs {
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    #[command(flatten)]
    common: CommonArgs,
}

/// Recognized config-file keys; unknown keys are rejected so typos fail loud.
#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    samples: Option<usize>,
    seed: Option<u64>,
    z: Option<f64>,
    workers: Option<usize>,
    format: Option<String>,
    output: Option<String>,
    n: Option<usize>,
    k: Option<usize>,
    norm: Option<String>,
    phi: Option<String>,
    submatrix_rows: Option<usize>,
    factor_override: Option<f64>,
    functional: Option<String>,
    sense: Option<String>,
    offset: Option<f64>,
    slope: Option<f64>,
    row: Option<usize>,
    col: Option<usize>,
    negate: Option<bool>,
    coeff_file: Option<String>,
    y_norm: Option<String>,
    z_norm: Option<String>,
    t: Option<String>,
    n_list: Option<Vec<usize>>,
    beta: Option<f64>,
    max_n: Option<usize>,
}

impl FileConfig {
    fn load(path: Option<&Path>) -> Result<FileConfig> {
        match path {
            None => Ok(FileConfig::default()),
            Some(p) => {
                let text = std::fs::read_to_string(p)?;
                Ok(serde_json::from_str(&text)?)
            }
        }
    }
}

/// JSON schema for the series coefficients: row-major square matrices.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CoefficientFile {
    n: usize,
    matrices: Vec<Vec<f64>>,
}

/// Everything resolved from flags, config file, environment, and defaults.
struct Resolved {
    settings: RunSettings,
    format: OutputFormat,
    output: Option<PathBuf>,
    config: FileConfig,
}

fn resolve_common(common: &CommonArgs, default_samples: usize) -> Result<Resolved> {
    let config = FileConfig::load(common.config.as_deref())?;
    let samples = common.samples.or(config.samples).unwrap_or(default_samples);
    let seed = common.seed.or(config.seed).unwrap_or(0);
    let z = common.z.or(config.z).unwrap_or(3.0);
    let workers = match common.workers.or(config.workers) {
        Some(w) => Some(w),
        None => env_workers()?,
    };
    let format = match (common.format, config.format.as_deref()) {
        (Some(f), _) => f,
        (None, Some("csv")) => OutputFormat::Csv,
        (None, Some("json")) => OutputFormat::Json,
        (None, Some(other)) => {
            return Err(Error::Config(format!(
                "unknown format '{other}' in config file (expected csv or json)"
            )))
        }
        (None, None) => OutputFormat::Csv,
    };
    let output = common
        .output
        .clone()
        .or_else(|| config.output.as_ref().map(PathBuf::from));
    let settings = RunSettings::new(samples, seed)
        .with_z(z)
        .with_workers(workers);
    settings.validate()?;
    Ok(Resolved {
        settings,
        format,
        output,
        config,
    })
}

fn env_workers() -> Result<Option<usize>> {
    match std::env::var(WORKERS_ENV_VAR) {
        Err(_) => Ok(None),
        Ok(text) => {
            let w: usize = text.parse().map_err(|_| {
                Error::Config(format!(
                    "{WORKERS_ENV_VAR} must be a positive integer, got '{text}'"
                ))
            })?;
            if w == 0 {
                return Err(Error::Config(format!(
                    "{WORKERS_ENV_VAR} must be at least one"
                )));
            }
            Ok(Some(w))
        }
    }
}

fn execute(cli: Cli) -> Result<i32> {
    let (body, resolved) = match cli.command {
        Cmd::Theorem1(args) => {
            let resolved = resolve_common(&args.common, DEFAULT_SAMPLES)?;
            let n = args.n.or(resolved.config.n);
            let k = args.k.or(resolved.config.k);
            let reports = match (n, k) {
                (None, None) => run_sublinear_grid(resolved.settings)?,
                (n, k) => {
                    let dims = Dims::new(
                        n.ok_or_else(|| Error::Config("missing --n (or give neither)".into()))?,
                        k.ok_or_else(|| Error::Config("missing --k (or give neither)".into()))?,
                    )?;
                    let norm: NormSpec = args
                        .norm
                        .or(resolved.config.norm.clone())
                        .as_deref()
                        .unwrap_or("spectral")
                        .parse()?;
                    let phi: PhiSpec = args
                        .phi
                        .or(resolved.config.phi.clone())
                        .as_deref()
                        .unwrap_or("identity")
                        .parse()?;
                    let restrict = args.submatrix_rows.or(resolved.config.submatrix_rows);
                    let factor_override =
                        args.factor_override.or(resolved.config.factor_override);
                    vec![run_sublinear_comparison(
                        dims,
                        norm,
                        phi,
                        restrict,
                        factor_override,
                        resolved.settings,
                    )?]
                }
            };
            (ReportBody::Comparisons(reports), resolved)
        }
        Cmd::Convex(args) => {
            let resolved = resolve_common(&args.common, DEFAULT_SAMPLES)?;
            let dims = Dims::new(
                args.n.or(resolved.config.n).unwrap_or(16),
                args.k.or(resolved.config.k).unwrap_or(4),
            )?;
            let functional = build_convex_functional(&args, &resolved.config)?;
            let sense: Sense = args
                .sense
                .or(resolved.config.sense.clone())
                .as_deref()
                .unwrap_or("convex")
                .parse()?;
            let report = run_convex_comparison(dims, &functional, sense, resolved.settings)?;
            (ReportBody::Comparisons(vec![report]), resolved)
        }
        Cmd::Ncgauss(args) => {
            let resolved = resolve_common(&args.common, DEFAULT_SAMPLES)?;
            let coeff_path = args
                .coeff_file
                .clone()
                .or_else(|| resolved.config.coeff_file.as_ref().map(PathBuf::from));
            let flag_n = args.n.or(resolved.config.n);
            let (n, coefficients) = match coeff_path {
                None => {
                    let n = flag_n.unwrap_or(8);
                    (n, vec![DenseMatrix::identity(n)])
                }
                Some(path) => {
                    let text = std::fs::read_to_string(&path)?;
                    let file: CoefficientFile = serde_json::from_str(&text)?;
                    if let Some(n) = flag_n {
                        if n != file.n {
                            return Err(Error::Config(format!(
                                "--n {n} conflicts with coefficient file size {}",
                                file.n
                            )));
                        }
                    }
                    let mats = file
                        .matrices
                        .into_iter()
                        .map(|rows| DenseMatrix::new(file.n, file.n, rows))
                        .collect::<Result<Vec<_>>>()?;
                    (file.n, mats)
                }
            };
            let norm: NormSpec = args
                .norm
                .or(resolved.config.norm.clone())
                .as_deref()
                .unwrap_or("spectral")
                .parse()?;
            let phi: PhiSpec = args
                .phi
                .or(resolved.config.phi.clone())
                .as_deref()
                .unwrap_or("identity")
                .parse()?;
            let report = run_ncgauss(n, &coefficients, norm, phi, resolved.settings)?;
            (ReportBody::Comparisons(vec![report]), resolved)
        }
        Cmd::Converse1(args) => {
            let resolved = resolve_common(&args.common, DEFAULT_SAMPLES)?;
            let dims = Dims::new(
                args.n.or(resolved.config.n).unwrap_or(16),
                args.k.or(resolved.config.k).unwrap_or(4),
            )?;
            let norm: NormSpec = args
                .norm
                .or(resolved.config.norm.clone())
                .as_deref()
                .unwrap_or("spectral")
                .parse()?;
            let report = run_converse1(dims, norm, resolved.settings)?;
            (ReportBody::Comparisons(vec![report]), resolved)
        }
        Cmd::Converse2(args) => {
            let resolved = resolve_common(&args.common, DEFAULT_SAMPLES)?;
            let dims = Dims::new(
                args.n.or(resolved.config.n).unwrap_or(16),
                args.k.or(resolved.config.k).unwrap_or(4),
            )?;
            let domain: VectorNorm = args
                .y_norm
                .or(resolved.config.y_norm.clone())
                .as_deref()
                .unwrap_or("l2")
                .parse()?;
            let codomain: VectorNorm = args
                .z_norm
                .or(resolved.config.z_norm.clone())
                .as_deref()
                .unwrap_or("l2")
                .parse()?;
            let auxiliary: AuxiliaryFactor = args
                .t
                .or(resolved.config.t.clone())
                .as_deref()
                .unwrap_or("wishart_w")
                .parse()?;
            let report = run_converse2(dims, domain, codomain, auxiliary, resolved.settings)?;
            (ReportBody::Comparisons(vec![report]), resolved)
        }
        Cmd::Maxentry(args) => {
            let resolved = resolve_common(&args.common, DEFAULT_SAMPLES)?;
            let n_list = match args.n_list {
                Some(text) => parse_n_list(&text)?,
                None => resolved
                    .config
                    .n_list
                    .clone()
                    .unwrap_or_else(|| vec![64, 256]),
            };
            let seed = resolved.settings.seed;
            let rows = run_maxentry_study(&n_list, resolved.settings)?;
            (ReportBody::MaxEntry(rows, seed), resolved)
        }
        Cmd::Counterexample(args) => {
            let resolved = resolve_common(&args.common, DEFAULT_SAMPLES)?;
            let dims = Dims::new(
                args.n.or(resolved.config.n).unwrap_or(8),
                args.k.or(resolved.config.k).unwrap_or(8),
            )?;
            let beta = args.beta.or(resolved.config.beta).unwrap_or(1.0);
            let report = run_counterexample(dims, beta, resolved.settings)?;
            (ReportBody::Counterexample(report), resolved)
        }
        Cmd::AlphaTable(args) => {
            let resolved = resolve_common(&args.common, DEFAULT_SAMPLES)?;
            let max_n = args.max_n.or(resolved.config.max_n).unwrap_or(8);
            if max_n == 0 {
                return Err(Error::Config("max_n must be at least one".into()));
            }
            let mut rows = Vec::new();
            for n in 1..=max_n {
                for k in 1..=n {
                    rows.push(alpha_report(k, n)?);
                }
            }
            (ReportBody::Alpha(rows), resolved)
        }
        Cmd::Selftest(args) => {
            let resolved = resolve_common(&args.common, DEFAULT_SELFTEST_SAMPLES)?;
            let dims = Dims::new(
                args.n.or(resolved.config.n).unwrap_or(20),
                args.k.or(resolved.config.k).unwrap_or(5),
            )?;
            let report = run_distribution_selftests(dims, resolved.settings)?;
            (ReportBody::SelfTest(report), resolved)
        }
    };

    let rendered = match resolved.format {
        OutputFormat::Csv => body.to_csv(),
        OutputFormat::Json => body.to_json(),
    };
    match &resolved.output {
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(rendered.as_bytes())?;
        }
        Some(path) => std::fs::write(path, rendered.as_bytes())?,
    }
    eprint!("{}", body.summary());
    Ok(body.exit_code())
}

fn build_convex_functional(args: &ConvexArgs, config: &FileConfig) -> Result<ConvexFunctional> {
    let family = args
        .functional
        .clone()
        .or(config.functional.clone())
        .unwrap_or_else(|| "phi-norm".into());
    let norm: NormSpec = args
        .norm
        .clone()
        .or(config.norm.clone())
        .as_deref()
        .unwrap_or("frobenius")
        .parse()?;
    let inner = match family.as_str() {
        "phi-norm" => ConvexFunctional::PhiNorm {
            phi: args
                .phi
                .clone()
                .or(config.phi.clone())
                .as_deref()
                .unwrap_or("identity")
                .parse()?,
            norm,
        },
        "affine" => ConvexFunctional::AffineNorm {
            offset: args.offset.or(config.offset).unwrap_or(0.0),
            slope: args.slope.or(config.slope).unwrap_or(1.0),
            norm,
        },
        "entry" => ConvexFunctional::Entry {
            row: args.row.or(config.row).unwrap_or(0),
            col: args.col.or(config.col).unwrap_or(0),
        },
        other => {
            return Err(Error::Config(format!(
                "unknown functional family '{other}' (expected phi-norm, affine, or entry)"
            )))
        }
    };
    let negate = args.negate || config.negate.unwrap_or(false);
    Ok(if negate {
        ConvexFunctional::Negated(Box::new(inner))
    } else {
        inner
    })
}

fn parse_n_list(text: &str) -> Result<Vec<usize>> {
    text.split(',')
        .map(|part| {
            part.trim().parse::<usize>().map_err(|_| {
                Error::Config(format!("cannot parse '{part}' in --n-list as a size"))
            })
        })
        .collect()
}

/// The typed result of a subcommand, ready for rendering.
enum ReportBody {
    Comparisons(Vec<ComparisonReport>),
    MaxEntry(Vec<MaxEntryRow>, u64),
    Alpha(Vec<AlphaReport>),
    Counterexample(CounterexampleReport),
    SelfTest(SelfTestReport),
}

/// Floats in report files carry 17 significant digits, enough to round-trip
/// the exact binary value.
fn fmt_float(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        format!("{x}")
    }
}

/// Quotes a CSV field only when it needs it.
fn csv_field(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn json_string(s: &str) -> String {
    serde_json::to_string(s).expect("strings serialize")
}

/// A float as a JSON value; JSON has no non-finite literals, so those become
/// quoted strings.
fn json_float(x: f64) -> String {
    if x.is_finite() {
        fmt_float(x)
    } else {
        json_string(&x.to_string())
    }
}

impl ReportBody {
    fn exit_code(&self) -> i32 {
        match self {
            ReportBody::Comparisons(reports) => {
                if reports
                    .iter()
                    .any(|r| r.verdict.status == VerdictStatus::Violated)
                {
                    2
                } else {
                    0
                }
            }
            ReportBody::SelfTest(report) => {
                if report.all_passed() {
                    0
                } else {
                    2
                }
            }
            _ => 0,
        }
    }

    fn to_csv(&self) -> String {
        let mut out = String::new();
        match self {
            ReportBody::Comparisons(reports) => {
                out.push_str(
                    "theorem_id,n,k,norm,phi,factor,lhs_mean,lhs_stderr,rhs_mean,rhs_stderr,\
                     verdict,z_margin,seed,samples\n",
                );
                for r in reports {
                    let norm = r.norm.map(|n| n.to_string()).unwrap_or_default();
                    let phi = r.phi.clone().unwrap_or_default();
                    out.push_str(&format!(
                        "{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
                        csv_field(&r.experiment),
                        r.dims.n(),
                        r.dims.k(),
                        csv_field(&norm),
                        csv_field(&phi),
                        fmt_float(r.factor),
                        fmt_float(r.lhs.mean),
                        fmt_float(r.lhs.stderr),
                        fmt_float(r.rhs.mean),
                        fmt_float(r.rhs.stderr),
                        r.verdict.status,
                        fmt_float(r.verdict.z_margin),
                        r.seed,
                        r.n_samples,
                    ));
                }
            }
            ReportBody::MaxEntry(rows, seed) => {
                out.push_str("n,estimate_mean,estimate_stderr,bound,normalized,seed,samples\n");
                for row in rows {
                    out.push_str(&format!(
                        "{},{},{},{},{},{},{}\n",
                        row.n,
                        fmt_float(row.estimate.mean),
                        fmt_float(row.estimate.stderr),
                        fmt_float(row.bound),
                        fmt_float(row.normalized),
                        seed,
                        row.estimate.n_samples,
                    ));
                }
            }
            ReportBody::Alpha(rows) => {
                out.push_str(
                    "n,k,alpha,lower_sum,upper_sum,lower_integral,upper_integral,\
                     factor_exact,factor_bound\n",
                );
                for r in rows {
                    out.push_str(&format!(
                        "{},{},{},{},{},{},{},{},{}\n",
                        r.n,
                        r.k,
                        fmt_float(r.alpha),
                        fmt_float(r.lower_sum),
                        fmt_float(r.upper_sum),
                        fmt_float(r.lower_integral),
                        fmt_float(r.upper_integral),
                        fmt_float(r.factor_exact),
                        fmt_float(r.factor_bound),
                    ));
                }
            }
            ReportBody::Counterexample(r) => {
                out.push_str(
                    "n,k,beta,gaussian_mean,gaussian_stderr,frame_mean,frame_stderr,\
                     frame_zero_fraction,demonstrated,seed,samples\n",
                );
                out.push_str(&format!(
                    "{},{},{},{},{},{},{},{},{},{},{}\n",
                    r.dims.n(),
                    r.dims.k(),
                    fmt_float(r.beta),
                    fmt_float(r.gaussian_side.mean),
                    fmt_float(r.gaussian_side.stderr),
                    fmt_float(r.frame_side.mean),
                    fmt_float(r.frame_side.stderr),
                    fmt_float(r.frame_zero_fraction),
                    r.demonstrated,
                    r.seed,
                    r.n_samples,
                ));
            }
            ReportBody::SelfTest(report) => {
                out.push_str("check,statistic,threshold,passed\n");
                for c in &report.checks {
                    out.push_str(&format!(
                        "{},{},{},{}\n",
                        csv_field(&c.name),
                        fmt_float(c.statistic),
                        fmt_float(c.threshold),
                        c.passed,
                    ));
                }
            }
        }
        out
    }

    fn to_json(&self) -> String {
        let mut rows: Vec<String> = Vec::new();
        match self {
            ReportBody::Comparisons(reports) => {
                for r in reports {
                    let norm = r.norm.map(|n| n.to_string()).unwrap_or_default();
                    let phi = r.phi.clone().unwrap_or_default();
                    rows.push(format!(
                        "{{\"theorem_id\":{},\"n\":{},\"k\":{},\"norm\":{},\"phi\":{},\
                         \"factor\":{},\"lhs_mean\":{},\"lhs_stderr\":{},\"rhs_mean\":{},\
                         \"rhs_stderr\":{},\"verdict\":{},\"z_margin\":{},\"seed\":{},\
                         \"samples\":{}}}",
                        json_string(&r.experiment),
                        r.dims.n(),
                        r.dims.k(),
                        json_string(&norm),
                        json_string(&phi),
                        json_float(r.factor),
                        json_float(r.lhs.mean),
                        json_float(r.lhs.stderr),
                        json_float(r.rhs.mean),
                        json_float(r.rhs.stderr),
                        json_string(&r.verdict.status.to_string()),
                        json_float(r.verdict.z_margin),
                        r.seed,
                        r.n_samples,
                    ));
                }
            }
            ReportBody::MaxEntry(rows_in, seed) => {
                for row in rows_in {
                    rows.push(format!(
                        "{{\"n\":{},\"estimate_mean\":{},\"estimate_stderr\":{},\
                         \"bound\":{},\"normalized\":{},\"seed\":{},\"samples\":{}}}",
                        row.n,
                        json_float(row.estimate.mean),
                        json_float(row.estimate.stderr),
                        json_float(row.bound),
                        json_float(row.normalized),
                        seed,
                        row.estimate.n_samples,
                    ));
                }
            }
            ReportBody::Alpha(rows_in) => {
                for r in rows_in {
                    rows.push(format!(
                        "{{\"n\":{},\"k\":{},\"alpha\":{},\"lower_sum\":{},\"upper_sum\":{},\
                         \"lower_integral\":{},\"upper_integral\":{},\"factor_exact\":{},\
                         \"factor_bound\":{}}}",
                        r.n,
                        r.k,
                        json_float(r.alpha),
                        json_float(r.lower_sum),
                        json_float(r.upper_sum),
                        json_float(r.lower_integral),
                        json_float(r.upper_integral),
                        json_float(r.factor_exact),
                        json_float(r.factor_bound),
                    ));
                }
            }
            ReportBody::Counterexample(r) => {
                rows.push(format!(
                    "{{\"n\":{},\"k\":{},\"beta\":{},\"gaussian_mean\":{},\
                     \"gaussian_stderr\":{},\"frame_mean\":{},\"frame_stderr\":{},\
                     \"frame_zero_fraction\":{},\"demonstrated\":{},\"seed\":{},\"samples\":{}}}",
                    r.dims.n(),
                    r.dims.k(),
                    json_float(r.beta),
                    json_float(r.gaussian_side.mean),
                    json_float(r.gaussian_side.stderr),
                    json_float(r.frame_side.mean),
                    json_float(r.frame_side.stderr),
                    json_float(r.frame_zero_fraction),
                    r.demonstrated,
                    r.seed,
                    r.n_samples,
                ));
            }
            ReportBody::SelfTest(report) => {
                for c in &report.checks {
                    rows.push(format!(
                        "{{\"check\":{},\"statistic\":{},\"threshold\":{},\"passed\":{}}}",
                        json_string(&c.name),
                        json_float(c.statistic),
                        json_float(c.threshold),
                        c.passed,
                    ));
                }
            }
        }
        let mut out = String::from("[\n");
        out.push_str(&rows.join(",\n"));
        out.push_str("\n]\n");
        out
    }

    fn summary(&self) -> String {
        let mut out = String::new();
        match self {
            ReportBody::Comparisons(reports) => {
                for r in reports {
                    out.push_str(&format!(
                        "{} {} {}{}: lhs {:.6} (se {:.2e}) vs rhs {:.6} (se {:.2e}) \
                         [{}] z_margin {:.2} ({:.2?})\n",
                        r.experiment,
                        r.dims,
                        r.norm.map(|n| n.to_string()).unwrap_or_default(),
                        r.phi
                            .as_ref()
                            .map(|p| format!(" {p}"))
                            .unwrap_or_default(),
                        r.lhs.mean,
                        r.lhs.stderr,
                        r.rhs.mean,
                        r.rhs.stderr,
                        r.verdict.status,
                        r.verdict.z_margin,
                        r.wall_time,
                    ));
                }
                let violated = reports
                    .iter()
                    .filter(|r| r.verdict.status == VerdictStatus::Violated)
                    .count();
                out.push_str(&format!(
                    "{} comparison(s), {} violated\n",
                    reports.len(),
                    violated
                ));
            }
            ReportBody::MaxEntry(rows, _) => {
                for row in rows {
                    out.push_str(&format!(
                        "n={}: largest entry {:.6} (se {:.2e}) <= bound {:.6}, \
                         normalized {:.4}\n",
                        row.n, row.estimate.mean, row.estimate.stderr, row.bound, row.normalized
                    ));
                }
            }
            ReportBody::Alpha(rows) => {
                out.push_str(&format!("{} constant row(s) emitted\n", rows.len()));
            }
            ReportBody::Counterexample(r) => {
                out.push_str(&format!(
                    "counterexample {} beta={}: gaussian side {:.6} (se {:.2e}) > 0, \
                     frame side {:.3e} (zero fraction {:.4}) -> demonstrated: {}\n",
                    r.dims,
                    r.beta,
                    r.gaussian_side.mean,
                    r.gaussian_side.stderr,
                    r.frame_side.mean,
                    r.frame_zero_fraction,
                    r.demonstrated
                ));
            }
            ReportBody::SelfTest(report) => {
                for c in report.failed_checks() {
                    out.push_str(&format!(
                        "FAILED {}: statistic {:.4} > threshold {:.4}\n",
                        c.name, c.statistic, c.threshold
                    ));
                }
                out.push_str(&format!(
                    "self-test {}: {}/{} checks passed ({:.2?})\n",
                    report.dims,
                    report.checks.len() - report.failed_checks().len(),
                    report.checks.len(),
                    report.wall_time
                ));
            }
        }
        out
    }
}
