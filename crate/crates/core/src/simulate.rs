//! Synthetic catalogs and estimator-recovery studies.
//!
//! Every catalog is a pure function of its [`SimSpec`]: draws come from a
//! ChaCha8 stream keyed by the seed, and replication `r` of a study uses
//! stream `r` of the same key.

use rand::distr::Open01;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::catalog::{Catalog, CompositionClass, EruptionRecord};
use crate::error::{Error, Result};
use crate::fit::{fit_aggregate, fit_exponential, fit_regression, FitResult};
use crate::likelihood::RegressionParams;
use crate::pareto::{ExpParams, GPaParams};

/// Identifier of the generator family, recorded alongside seeds.
pub const RNG_ALGORITHM: &str = "chacha8";

/// Discrete silica distribution used for regression simulations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SilicaMixture {
    pub points: Vec<SilicaPoint>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SilicaPoint {
    pub silica_pct: f64,
    pub weight: f64,
    pub class: CompositionClass,
}

impl Default for SilicaMixture {
    /// Basalt / andesite / dacite-rhyolite proportions 42 : 105 : 30.
    fn default() -> Self {
        let p = |silica_pct, weight, class| SilicaPoint {
            silica_pct,
            weight,
            class,
        };
        SilicaMixture {
            points: vec![
                p(50.0, 42.0, CompositionClass::Mafic),
                p(58.0, 105.0, CompositionClass::Intermediate),
                p(67.0, 30.0, CompositionClass::Evolved),
            ],
        }
    }
}

impl SilicaMixture {
    fn draw(&self, u: f64) -> SilicaPoint {
        let total: f64 = self.points.iter().map(|p| p.weight).sum();
        let mut acc = 0.0;
        for p in &self.points {
            acc += p.weight / total;
            if u < acc {
                return *p;
            }
        }
        *self.points.last().expect("non-empty mixture")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum GeneratingModel {
    #[serde(rename = "gpa")]
    GPa { params: GPaParams },
    Regression {
        params: RegressionParams,
        #[serde(default)]
        silica: SilicaMixture,
    },
    Exponential { params: ExpParams },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum CensoringRule {
    None,
    /// Eruptions start uniformly over the last `horizon` years and are
    /// censored at the catalog date if still running.
    FixedHorizon { horizon: f64 },
    /// Each record is independently marked ongoing with this probability and
    /// its duration cut to a uniform fraction of the true value.
    RandomFraction { fraction: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimSpec {
    pub model: GeneratingModel,
    pub n: usize,
    pub censoring: CensoringRule,
    pub seed: u64,
}

impl SimSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::Usage("simulation needs n >= 1".into()));
        }
        match self.censoring {
            CensoringRule::FixedHorizon { horizon } if !(horizon > 0.0 && horizon.is_finite()) => {
                Err(Error::invalid("horizon", horizon, "must be positive and finite"))
            }
            CensoringRule::RandomFraction { fraction } if !(0.0..1.0).contains(&fraction) => {
                Err(Error::invalid("fraction", fraction, "must lie in [0, 1)"))
            }
            _ => match &self.model {
                GeneratingModel::Regression { silica, .. }
                    if silica.points.is_empty() || silica.points.iter().any(|p| p.weight.is_nan() || p.weight < 0.0) =>
                {
                    Err(Error::Usage("silica mixture needs non-negative weights".into()))
                }
                _ => Ok(()),
            },
        }
    }
}

fn uniform(rng: &mut ChaCha8Rng) -> f64 {
    rng.sample(Open01)
}

/// Generates the catalog described by `spec` (stream 0).
pub fn generate(spec: &SimSpec) -> Result<Catalog> {
    generate_stream(spec, 0)
}

/// Generates replicate `stream` of `spec`.
pub fn generate_stream(spec: &SimSpec, stream: u64) -> Result<Catalog> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    rng.set_stream(stream);
    let mut records = Vec::with_capacity(spec.n);
    for i in 0..spec.n {
        let (duration, class, silica) = match &spec.model {
            GeneratingModel::GPa { params } => {
                (params.sample(uniform(&mut rng))?, CompositionClass::Intermediate, None)
            }
            GeneratingModel::Exponential { params } => {
                (params.sample(uniform(&mut rng))?, CompositionClass::Intermediate, None)
            }
            GeneratingModel::Regression { params, silica } => {
                let point = silica.draw(uniform(&mut rng));
                let law = params.for_silica(point.silica_pct)?;
                (law.sample(uniform(&mut rng))?, point.class, Some(point.silica_pct))
            }
        };
        let (observed, censored, start) = match spec.censoring {
            CensoringRule::None => (duration, false, 0.0),
            CensoringRule::FixedHorizon { horizon } => {
                let start = uniform(&mut rng) * horizon;
                let window = horizon - start;
                if duration > window {
                    (window, true, start)
                } else {
                    (duration, false, start)
                }
            }
            CensoringRule::RandomFraction { fraction } => {
                let u = uniform(&mut rng);
                let cut = uniform(&mut rng);
                if u < fraction {
                    (duration * cut, true, 0.0)
                } else {
                    (duration, false, 0.0)
                }
            }
        };
        // Extremely small draws can underflow; keep the positivity invariant.
        let observed = observed.max(f64::MIN_POSITIVE);
        records.push(EruptionRecord::new(
            format!("SIM{:05}", i + 1),
            start,
            observed,
            censored,
            class,
            silica,
        )?);
    }
    Catalog::new(records, None)
}

/// Expected censored fraction under fixed-horizon censoring for `GPa(α, β)`:
/// `(1/h) ∫₀ʰ (1 + x/β)^(-α) dx`.
pub fn fixed_horizon_censored_fraction(params: &GPaParams, horizon: f64) -> f64 {
    let (a, b) = (params.alpha(), params.beta());
    let r = horizon / b;
    if (a - 1.0).abs() < 1e-12 {
        r.ln_1p() / r
    } else {
        ((1.0 - a) * r.ln_1p()).exp_m1() / ((1.0 - a) * r)
    }
}

/// Horizon at which fixed-horizon censoring of `GPa(α, β)` durations
/// censors `fraction` of records on average.
pub fn horizon_for_censored_fraction(params: &GPaParams, fraction: f64) -> Result<f64> {
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(Error::invalid("fraction", fraction, "must lie in (0, 1)"));
    }
    let (mut lo, mut hi) = (1e-12_f64.ln(), 1e15_f64.ln());
    let f = |lh: f64| fixed_horizon_censored_fraction(params, lh.exp()) - fraction;
    if f(lo) < 0.0 || f(hi) > 0.0 {
        return Err(Error::Bracket(format!("no horizon gives censored fraction {fraction}")));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((0.5 * (lo + hi)).exp())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParameterRecovery {
    pub name: String,
    pub truth: f64,
    pub mean_estimate: f64,
    pub bias: f64,
    pub rmse: f64,
    /// Fraction of replications whose Wald 95% interval covers the truth,
    /// among those with standard errors.
    pub wald95_coverage: f64,
    pub with_standard_errors: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecoveryReport {
    pub spec: SimSpec,
    pub rng: String,
    pub replications: usize,
    pub failures: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub failure_messages: Vec<String>,
    pub parameters: Vec<ParameterRecovery>,
}

fn truth(model: &GeneratingModel) -> Vec<(&'static str, f64)> {
    match model {
        GeneratingModel::GPa { params } => vec![("alpha", params.alpha()), ("beta", params.beta())],
        GeneratingModel::Regression { params, .. } => vec![
            ("alpha", params.alpha),
            ("beta", params.beta),
            ("gamma_alpha", params.gamma_alpha),
            ("gamma_beta", params.gamma_beta),
        ],
        GeneratingModel::Exponential { params } => vec![("lambda", params.lambda())],
    }
}

/// Fits the model family that generated `catalog`.
pub fn fit_generating_family(model: &GeneratingModel, catalog: &Catalog) -> Result<FitResult> {
    match model {
        GeneratingModel::GPa { .. } => fit_aggregate(catalog),
        GeneratingModel::Regression { .. } => fit_regression(catalog),
        GeneratingModel::Exponential { .. } => fit_exponential(catalog),
    }
}

/// Generates and refits `replications` independent catalogs.
pub fn recovery_study(spec: &SimSpec, replications: usize) -> Result<RecoveryReport> {
    spec.validate()?;
    if replications < 10 {
        return Err(Error::Usage(format!("recovery study needs at least 10 replications, got {replications}")));
    }
    let outcomes: Vec<Result<FitResult>> = (0..replications as u64)
        .into_par_iter()
        .map(|r| {
            let catalog = generate_stream(spec, r)?;
            fit_generating_family(&spec.model, &catalog)
        })
        .collect();

    let mut failure_messages = Vec::new();
    let fits: Vec<FitResult> = outcomes
        .into_iter()
        .filter_map(|o| o.map_err(|e| failure_messages.push(e.to_string())).ok())
        .collect();
    if fits.is_empty() {
        return Err(Error::Optimizer(format!("every replication failed: {}", failure_messages.join("; "))));
    }

    let parameters = truth(&spec.model)
        .into_iter()
        .map(|(name, truth)| {
            let estimates: Vec<f64> = fits.iter().filter_map(|f| f.estimate(name)).collect();
            let m = estimates.len() as f64;
            let mean_estimate = estimates.iter().sum::<f64>() / m;
            let rmse = (estimates.iter().map(|e| (e - truth).powi(2)).sum::<f64>() / m).sqrt();
            let with_se: Vec<(f64, f64)> = fits
                .iter()
                .filter_map(|f| Some((f.estimate(name)?, f.standard_error(name)?)))
                .collect();
            let covered = with_se.iter().filter(|(e, se)| (e - truth).abs() <= 1.959_963_984_540_054 * se).count();
            ParameterRecovery {
                name: name.to_string(),
                truth,
                mean_estimate,
                bias: mean_estimate - truth,
                rmse,
                wald95_coverage: if with_se.is_empty() { f64::NAN } else { covered as f64 / with_se.len() as f64 },
                with_standard_errors: with_se.len(),
            }
        })
        .collect();

    Ok(RecoveryReport {
        spec: spec.clone(),
        rng: RNG_ALGORITHM.to_string(),
        replications,
        failures: failure_messages.len(),
        failure_messages,
        parameters,
    })
}
