//! Construction of population-weighted tropical-cyclone intensity indicators
//! from gridded wind data, and estimation of their growth impact with spatial
//! panel models, Conley spatial-HAC regressions, panel unit-root batteries,
//! and ARMAX time-series models.
//!
//! The crate is organised around the stages of that pipeline:
//!
//! - [`gridwind`] — per-pixel maximum sustained winds for each storm, either
//!   simulated from 6-hourly track fixes with a parametric radial profile or
//!   ingested from pre-gridded exposure files.
//! - [`exposure`] — region × period indicators: the population-weighted wind
//!   measure (quarterly and annual, the latter with a temporal weight), the
//!   exposed-population share, and event counts.
//! - [`tseries`] — growth construction, ACF/PACF, ADF/PP and LLC/IPS
//!   unit-root tests with simulated null distributions, and a moving-average
//!   seasonal adjuster.
//! - [`spatial`] — contiguity weight matrices and maximum-likelihood spatial
//!   panel estimators (SEM, SAC, SAR, SDM) with two-way fixed effects, Wald
//!   specification tests, and a Conley spatial-HAC fixed-effects estimator.
//! - [`arimax`] — state-space ARMAX estimation with exogenous distributed
//!   lags, optimal-lag selection criteria, and fit comparison.
//! - [`pipeline`] — configuration, dataset assembly and validation, synthetic
//!   data generators for estimator validation, and result-table emission.
//!
//! Monte-Carlo loops and per-storm work are data-parallel via `rayon` when
//! the default `parallel` feature is enabled; disabling it yields a fully
//! sequential build with identical results.

pub mod arimax;
pub mod error;
pub mod exposure;
pub mod geo;
pub mod gridwind;
pub mod period;
pub mod pipeline;
pub mod spatial;
pub mod tseries;

pub(crate) mod ols;
pub(crate) mod optim;
pub(crate) mod par;

pub use error::{Error, Result};
pub use period::{Frequency, Period};

/// Minimum sustained wind (km/h) for a pixel to count as exposed; the 34-knot
/// floor used throughout the exposure data model.
pub const WIND_FLOOR_KMH: f64 = 63.0;
