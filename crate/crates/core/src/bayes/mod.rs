//! Objective-Bayes inference by random-walk Metropolis–Hastings.
//!
//! The chain moves on the working scale `(log α, log β, γ_α, γ_β)`; the
//! Jacobian of the log transform is part of the target. Proposal scales are
//! tuned during burn-in only and frozen before any draw is recorded.

mod export;
mod prior;
mod summary;

use rand::distr::Open01;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::catalog::Catalog;
use crate::error::{Error, Result};
use crate::fit::{fit_aggregate, fit_regression, ModelKind};
use crate::likelihood::{nllh_records, RegressionParams, SilicaRecords};
use crate::simulate::RNG_ALGORITHM;

pub use export::{read_chain_csv, write_chain_csv};
pub use prior::{propriety_check, PriorSpec, Propriety};
pub use summary::{chain_summary, ChainSummary, ParameterSummary, MIN_SUMMARY_DRAWS};

pub const DEFAULT_BURN_IN: usize = 10_000;
pub const DEFAULT_ITERATIONS: usize = 1_000_000;
pub const DEFAULT_THIN: usize = 1_000;
pub const DEFAULT_PROPOSAL_SCALE: f64 = 0.1;
/// Burn-in steps between proposal-scale adjustments.
pub const TUNING_WINDOW: usize = 500;
pub const TUNING_FACTOR: f64 = 1.5;
pub const TARGET_ACCEPTANCE: (f64, f64) = (0.2, 0.5);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McmcConfig {
    pub burn_in: usize,
    pub iterations: usize,
    pub thin: usize,
    pub seed: u64,
    /// Initial per-coordinate random-walk standard deviations on the working
    /// scale; `None` uses `DEFAULT_PROPOSAL_SCALE` everywhere.
    #[serde(default)]
    pub proposal_scales: Option<Vec<f64>>,
}

impl Default for McmcConfig {
    fn default() -> Self {
        McmcConfig {
            burn_in: DEFAULT_BURN_IN,
            iterations: DEFAULT_ITERATIONS,
            thin: DEFAULT_THIN,
            seed: 0,
            proposal_scales: None,
        }
    }
}

impl McmcConfig {
    pub fn validate(&self, dim: usize) -> Result<()> {
        if self.thin == 0 || self.iterations == 0 {
            return Err(Error::Usage("iterations and thin must be positive".into()));
        }
        if !self.iterations.is_multiple_of(self.thin) {
            return Err(Error::Usage(format!(
                "iterations ({}) must be divisible by thin ({})",
                self.iterations, self.thin
            )));
        }
        if let Some(scales) = &self.proposal_scales {
            if scales.len() != dim {
                return Err(Error::Usage(format!("expected {dim} proposal scales, got {}", scales.len())));
            }
            if scales.iter().any(|s| !(*s > 0.0 && s.is_finite())) {
                return Err(Error::Usage("proposal scales must be positive".into()));
            }
        }
        Ok(())
    }
}

/// Run metadata written next to an exported chain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainProvenance {
    pub schema: String,
    pub model_kind: ModelKind,
    pub parameters: Vec<String>,
    pub rng: String,
    pub config: McmcConfig,
    pub prior: PriorSpec,
    pub acceptance_rate: f64,
    pub burn_in_acceptance_rate: f64,
    /// Proposal scales after burn-in tuning.
    pub tuned_scales: Vec<f64>,
    pub start: Vec<f64>,
}

/// Thinned post-burn-in draws on the natural scale.
#[derive(Debug, Clone, PartialEq)]
pub struct PosteriorChain {
    pub model_kind: ModelKind,
    pub draws: Vec<Vec<f64>>,
    pub provenance: Option<ChainProvenance>,
}

impl PosteriorChain {
    /// A chain assembled from externally supplied draws.
    pub fn from_draws(model_kind: ModelKind, draws: Vec<Vec<f64>>) -> Result<Self> {
        let dim = posterior_dim(model_kind)?;
        if draws.is_empty() {
            return Err(Error::InsufficientData("chain has no draws".into()));
        }
        for d in &draws {
            if d.len() != dim {
                return Err(Error::Usage(format!("draw has {} values, expected {dim}", d.len())));
            }
            if !(d[0] > 0.0 && d[1] > 0.0) || d.iter().any(|v| !v.is_finite()) {
                return Err(Error::Usage(format!("draw {d:?} outside the parameter domain")));
            }
        }
        Ok(PosteriorChain {
            model_kind,
            draws,
            provenance: None,
        })
    }

    pub fn parameter_names(&self) -> &'static [&'static str] {
        self.model_kind.parameter_names()
    }

    pub fn acceptance_rate(&self) -> Option<f64> {
        self.provenance.as_ref().map(|p| p.acceptance_rate)
    }

    /// Values of one parameter across draws.
    pub fn column(&self, index: usize) -> Vec<f64> {
        self.draws.iter().map(|d| d[index]).collect()
    }

    pub fn len(&self) -> usize {
        self.draws.len()
    }

    pub fn is_empty(&self) -> bool {
        self.draws.is_empty()
    }
}

fn posterior_dim(kind: ModelKind) -> Result<usize> {
    match kind {
        ModelKind::Aggregate | ModelKind::GroupedClass => Ok(2),
        ModelKind::Regression => Ok(4),
        ModelKind::Exponential => Err(Error::Usage("no posterior sampler for the exponential model".into())),
    }
}

enum Target<'a> {
    Gpa(&'a Catalog),
    Regression(SilicaRecords<'a>),
}

impl<'a> Target<'a> {
    fn new(kind: ModelKind, catalog: &'a Catalog) -> Result<Self> {
        posterior_dim(kind)?;
        Ok(match kind {
            ModelKind::Regression => Target::Regression(SilicaRecords::new(catalog)?),
            _ => Target::Gpa(catalog),
        })
    }

    fn log_posterior(&self, prior: &PriorSpec, theta: &[f64]) -> f64 {
        let (alpha, beta) = (theta[0], theta[1]);
        let nllh = match self {
            Target::Gpa(c) => nllh_records(c.records(), alpha, beta),
            Target::Regression(data) => data.nllh(&RegressionParams {
                alpha,
                beta,
                gamma_alpha: theta[2],
                gamma_beta: theta[3],
            }),
        };
        -nllh + prior.log_density(alpha, beta)
    }
}

fn check_theta(kind: ModelKind, theta: &[f64]) -> Result<()> {
    let dim = posterior_dim(kind)?;
    if theta.len() != dim {
        return Err(Error::Usage(format!("expected {dim} parameters, got {}", theta.len())));
    }
    if !(theta[0] > 0.0 && theta[0].is_finite()) {
        return Err(Error::invalid("alpha", theta[0], "must be positive and finite"));
    }
    if !(theta[1] > 0.0 && theta[1].is_finite()) {
        return Err(Error::invalid("beta", theta[1], "must be positive and finite"));
    }
    if theta[2..].iter().any(|g| !g.is_finite()) {
        return Err(Error::Usage("regression slopes must be finite".into()));
    }
    Ok(())
}

/// Unnormalized log posterior `−ℓ(θ) + log π(α, β)` on the natural scale.
pub fn log_posterior(kind: ModelKind, catalog: &Catalog, prior: &PriorSpec, theta: &[f64]) -> Result<f64> {
    check_theta(kind, theta)?;
    Ok(Target::new(kind, catalog)?.log_posterior(prior, theta))
}

/// Metropolis acceptance for a symmetric proposal with log target ratio
/// `log_ratio`, given a uniform variate `u ∈ (0, 1)`.
pub fn metropolis_accept(log_ratio: f64, u: f64) -> bool {
    log_ratio >= 0.0 || u.ln() < log_ratio
}

/// Runs the sampler; see [`run_mh_with_sink`].
pub fn run_mh(kind: ModelKind, catalog: &Catalog, prior: &PriorSpec, config: &McmcConfig) -> Result<PosteriorChain> {
    run_mh_with_sink(kind, catalog, prior, config, |_| Ok(()))
}

/// Runs the sampler from the maximum-likelihood estimate, passing each
/// recorded draw to `sink` as it is produced.
pub fn run_mh_with_sink<S>(
    kind: ModelKind,
    catalog: &Catalog,
    prior: &PriorSpec,
    config: &McmcConfig,
    mut sink: S,
) -> Result<PosteriorChain>
where
    S: FnMut(&[f64]) -> Result<()>,
{
    let dim = posterior_dim(kind)?;
    config.validate(dim)?;
    if let Some(reason) = prior::impropriety_reason(prior, catalog.n_uncensored()) {
        return Err(Error::ImproperPosterior(reason));
    }
    let target = Target::new(kind, catalog)?;
    let start: Vec<f64> = match kind {
        ModelKind::Regression => {
            let fit = fit_regression(catalog)?;
            kind.parameter_names().iter().map(|n| fit.estimates[*n]).collect()
        }
        _ => {
            let fit = fit_aggregate(catalog)?;
            vec![fit.estimates["alpha"], fit.estimates["beta"]]
        }
    };

    let to_natural = |z: &[f64], out: &mut Vec<f64>| {
        out.clear();
        out.extend_from_slice(z);
        out[0] = z[0].exp();
        out[1] = z[1].exp();
    };
    // Log target on the working scale includes the Jacobian α·β.
    let log_target = |z: &[f64], buf: &mut Vec<f64>| {
        to_natural(z, buf);
        let v = target.log_posterior(prior, buf) + z[0] + z[1];
        if v.is_nan() {
            f64::NEG_INFINITY
        } else {
            v
        }
    };

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut scales = config
        .proposal_scales
        .clone()
        .unwrap_or_else(|| vec![DEFAULT_PROPOSAL_SCALE; dim]);
    let mut z: Vec<f64> = start.clone();
    z[0] = start[0].ln();
    z[1] = start[1].ln();
    let mut buf = Vec::with_capacity(dim);
    let mut current = log_target(&z, &mut buf);
    if !current.is_finite() {
        return Err(Error::Sampler("log posterior is not finite at the starting point".into()));
    }
    let mut proposal = z.clone();

    let mut step = |z: &mut Vec<f64>, current: &mut f64, scales: &[f64], rng: &mut ChaCha8Rng| -> bool {
        for ((p, zi), s) in proposal.iter_mut().zip(z.iter()).zip(scales) {
            *p = zi + s * rng.sample::<f64, _>(StandardNormal);
        }
        let candidate = log_target(&proposal, &mut buf);
        let u: f64 = rng.sample(Open01);
        if metropolis_accept(candidate - *current, u) {
            z.copy_from_slice(&proposal);
            *current = candidate;
            true
        } else {
            false
        }
    };

    let mut burn_accepted = 0usize;
    let mut window_accepted = 0usize;
    for i in 0..config.burn_in {
        if step(&mut z, &mut current, &scales, &mut rng) {
            burn_accepted += 1;
            window_accepted += 1;
        }
        if (i + 1) % TUNING_WINDOW == 0 {
            let rate = window_accepted as f64 / TUNING_WINDOW as f64;
            if rate < TARGET_ACCEPTANCE.0 {
                scales.iter_mut().for_each(|s| *s /= TUNING_FACTOR);
            } else if rate > TARGET_ACCEPTANCE.1 {
                scales.iter_mut().for_each(|s| *s *= TUNING_FACTOR);
            }
            window_accepted = 0;
        }
    }
    if config.burn_in > 0 && burn_accepted == 0 {
        return Err(Error::Sampler(format!("no proposal accepted during {} burn-in steps", config.burn_in)));
    }

    let mut draws = Vec::with_capacity(config.iterations / config.thin);
    let mut accepted = 0usize;
    let mut natural = Vec::with_capacity(dim);
    for i in 0..config.iterations {
        if step(&mut z, &mut current, &scales, &mut rng) {
            accepted += 1;
        }
        if (i + 1) % config.thin == 0 {
            to_natural(&z, &mut natural);
            sink(&natural)?;
            draws.push(natural.clone());
        }
    }

    let provenance = ChainProvenance {
        schema: crate::SCHEMA.to_string(),
        model_kind: kind,
        parameters: kind.parameter_names().iter().map(|s| s.to_string()).collect(),
        rng: RNG_ALGORITHM.to_string(),
        config: config.clone(),
        prior: *prior,
        acceptance_rate: accepted as f64 / config.iterations as f64,
        burn_in_acceptance_rate: if config.burn_in > 0 {
            burn_accepted as f64 / config.burn_in as f64
        } else {
            f64::NAN
        },
        tuned_scales: scales,
        start,
    };
    Ok(PosteriorChain {
        model_kind: kind,
        draws,
        provenance: Some(provenance),
    })
}
