//! Tail diagnostics built on the residual coefficient of variation.
//!
//! The residual CV of a positive random variable — standard deviation over
//! mean of the excess `X - t` given `X > t` — equals 1 at every threshold
//! exactly when `X` is exponential, and is constant (above or below 1) for
//! the generalized Pareto family. This crate turns that characterization
//! into working tools:
//!
//! - [`empirics`]: order-statistic machinery, the CV-plot curve, and the
//!   test statistics (`T`, `T_m`, `cv`, `MW`, `SU`).
//! - [`distributions`]: reproducible samplers and closed-form quantities
//!   for the exponential null and the Pareto / absolute-Student alternatives.
//! - [`asymptotics`]: the large-sample law of `T_m` (a weighted chi-square
//!   mixture), its eigenvalue computation, and a three-moment chi-square
//!   approximation for cheap p-values.
//! - [`montecarlo`]: finite-sample critical-value tables, empirical
//!   p-values, CV-plot error bands, and power studies.
//! - [`gpdfit`]: maximum-likelihood fitting of the generalized Pareto
//!   distribution via profile likelihood.
//! - [`cli`]: the `cvtail` command-line workflow over raw samples or price
//!   series.
//!
//! Monte Carlo loops are data-parallel with `rayon` when the default
//! `parallel` feature is enabled; replicate seeding is stream-based, so
//! results are bit-identical across thread counts and with the sequential
//! fallback (`--no-default-features`).

pub mod asymptotics;
pub mod cli;
pub mod distributions;
pub mod empirical;
pub mod empirics;
mod error;
pub mod exec;
pub mod gpdfit;
pub mod montecarlo;
pub mod rng;

pub use error::{Error, Result};
pub use rng::RandomSource;
