//! Heavy-tailed survival models for right-censored eruption-duration
//! catalogs.
//!
//! Durations follow a generalized Pareto law `GPa(α, β)` with survival
//! `(1 + t/β)^(-α)`, optionally with log-linear dependence of both parameters
//! on silica content. The crate covers catalog ingestion, censored likelihoods
//! and maximum-likelihood fitting, chi-square goodness of fit,
//! reference-prior Metropolis–Hastings sampling, remaining-duration forecasts
//! and synthetic-catalog recovery studies.

pub mod bayes;
pub mod catalog;
pub mod error;
pub mod fit;
pub mod forecast;
pub mod gof;
pub mod likelihood;
pub mod numeric;
pub mod optim;
pub mod pareto;
pub mod simulate;

pub use catalog::{parse_catalog, Catalog, CompositionClass, EruptionRecord};
pub use error::{Error, ErrorKind, Result};
pub use fit::{FitResult, ModelKind};
pub use likelihood::RegressionParams;
pub use pareto::{ExpParams, GPaParams};

/// Schema tag carried by every JSON document the crate writes.
pub const SCHEMA: &str = "domecast/v1";
