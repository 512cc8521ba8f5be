//! Nonparametric estimation and likelihood-based interval inference for the
//! Sen and Sen-Shorrocks-Thon (SST) poverty indices.
//!
//! The crate is organised bottom-up:
//!
//! - [`model`]: validated income samples, empirical CDF and the classical
//!   poverty components (headcount, income gap ratio, Gini among the poor).
//! - [`estimators`]: plug-in, Davidson and U-statistic point estimators,
//!   their asymptotic variances and the normal-approximation interval.
//! - [`el`]: empirical likelihood ratio statistics and the shared
//!   Lagrange-multiplier solver.
//! - [`jel`]: jackknife pseudo-values and jackknife empirical likelihood.
//! - [`simulation`]: samplers, quadrature truth and the Monte Carlo harness.
//! - [`io`]: CSV ingestion, analysis reports and simulation configuration.

pub mod el;
pub mod error;
pub mod estimators;
pub mod interval;
pub mod io;
pub mod jel;
pub mod model;
pub mod normal;
pub mod simulation;

pub use error::{PovError, Result};
pub use estimators::{EstimatorMethod, IndexEstimate, IndexKind};
pub use interval::{CiMethod, ConfidenceInterval};
pub use model::{IncomeSample, PovertyLine};
