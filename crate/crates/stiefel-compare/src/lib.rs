//! Monte Carlo comparison of random orthonormal frames against scaled
//! Gaussian matrices.
//!
//! A uniformly random `n x k` frame `Q` (orthonormal columns) behaves, under
//! every norm and increasing convex transform, like a Gaussian matrix of the
//! same shape with entries of variance `1/n` — up to an explicit scaling
//! factor that never exceeds `1 + k/(2n)`. This crate provides:
//!
//! - seeded, counter-addressed samplers for the ensembles involved
//!   ([`sampling`]);
//! - the factorizations connecting them: QR with a positive-diagonal
//!   convention, the directly sampled triangular factor, symmetric square
//!   roots, and polar decomposition ([`factorizations`]);
//! - the exact comparison constants with closed-form two-sided bounds
//!   ([`constants`]);
//! - the norm and transform catalog ([`functionals`]);
//! - Monte Carlo experiment drivers with noise-aware verdicts and
//!   reproducible reports ([`experiments`]);
//! - a command-line front end emitting CSV/JSON reports ([`cli`]).
//!
//! Reproducibility: every estimate is a pure function of `(seed, sample
//! count)`; worker threads only change scheduling, never results.

pub mod cli;
pub mod constants;
pub mod error;
pub mod experiments;
pub mod factorizations;
pub mod functionals;
pub mod matrix;
pub mod sampling;

pub use error::{Error, Result};
pub use matrix::{DenseMatrix, Dims};
