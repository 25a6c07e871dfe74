//! Censored negative log-likelihoods and closed-form conditional MLEs.
//!
//! Every generalized Pareto likelihood here goes through one kernel,
//!
//! ```text
//! ℓ = Σᵢ (αᵢ + δᵢ) log(1 + tᵢ/βᵢ) + Σᵢ δᵢ log(βᵢ/αᵢ)
//! ```
//!
//! with δᵢ = 1 for completed and 0 for ongoing eruptions. The aggregate and
//! grouped models use αᵢ = α, βᵢ = β; the regression model uses
//! αᵢ = α·exp(γ_α(xᵢ − 60)), βᵢ = β·exp(γ_β(xᵢ − 60)) for silica xᵢ.

use serde::{Deserialize, Serialize};

use crate::catalog::{Catalog, EruptionRecord};
use crate::error::{Error, Result};
use crate::numeric::NeumaierSum;
use crate::pareto::{ExpParams, GPaParams};

/// Silica percentage at which the regression reduces to its baseline `(α, β)`.
pub const SILICA_CENTER: f64 = 60.0;

/// Baseline generalized Pareto parameters plus log-linear silica slopes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegressionParams {
    pub alpha: f64,
    pub beta: f64,
    pub gamma_alpha: f64,
    pub gamma_beta: f64,
}

impl RegressionParams {
    pub fn new(alpha: f64, beta: f64, gamma_alpha: f64, gamma_beta: f64) -> Result<Self> {
        GPaParams::new(alpha, beta)?;
        if !gamma_alpha.is_finite() {
            return Err(Error::invalid("gamma_alpha", gamma_alpha, "must be finite"));
        }
        if !gamma_beta.is_finite() {
            return Err(Error::invalid("gamma_beta", gamma_beta, "must be finite"));
        }
        Ok(RegressionParams {
            alpha,
            beta,
            gamma_alpha,
            gamma_beta,
        })
    }

    /// The generalized Pareto law of an eruption with silica `x` percent.
    pub fn for_silica(&self, x: f64) -> Result<GPaParams> {
        let (a, b) = self.scaled(x);
        GPaParams::new(a, b)
    }

    fn scaled(&self, x: f64) -> (f64, f64) {
        let d = x - SILICA_CENTER;
        (
            self.alpha * (self.gamma_alpha * d).exp(),
            self.beta * (self.gamma_beta * d).exp(),
        )
    }

    pub fn baseline(&self) -> Result<GPaParams> {
        GPaParams::new(self.alpha, self.beta)
    }
}

fn record_term(r: &EruptionRecord, alpha: f64, beta: f64) -> f64 {
    let delta = r.uncensored_indicator();
    let mut term = (alpha + delta) * (r.duration / beta).ln_1p();
    if !r.censored {
        term += (beta / alpha).ln();
    }
    term
}

pub(crate) fn nllh_records(records: &[EruptionRecord], alpha: f64, beta: f64) -> f64 {
    let mut acc = NeumaierSum::new();
    for r in records {
        acc.add(record_term(r, alpha, beta));
    }
    acc.value()
}

/// `ℓ(α, β) = Σ(α + δᵢ) log(1 + tᵢ/β) + n₁ log(β/α)`.
pub fn nllh_aggregate(catalog: &Catalog, p: &GPaParams) -> f64 {
    nllh_records(catalog.records(), p.alpha(), p.beta())
}

fn require_uncensored(n1: usize) -> Result<()> {
    if n1 == 0 {
        Err(Error::InsufficientData(
            "no completed eruptions: the conditional MLE of alpha is unbounded".into(),
        ))
    } else {
        Ok(())
    }
}

pub(crate) fn profile_alpha_records(records: &[EruptionRecord], beta: f64) -> f64 {
    let n1 = records.iter().filter(|r| !r.censored).count() as f64;
    let x: NeumaierSum = records.iter().map(|r| (r.duration / beta).ln_1p()).collect();
    n1 / x.value()
}

/// Conditional MLE `α̂(β) = n₁ / Σ log(1 + tᵢ/β)`.
pub fn profile_alpha(catalog: &Catalog, beta: f64) -> Result<f64> {
    require_uncensored(catalog.n_uncensored())?;
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(Error::invalid("beta", beta, "must be positive and finite"));
    }
    Ok(profile_alpha_records(catalog.records(), beta))
}

/// Negative log-likelihood at `(α̂(β), β)`; also returns `α̂(β)`.
pub fn profile_nllh_aggregate(catalog: &Catalog, beta: f64) -> Result<(f64, f64)> {
    let alpha = profile_alpha(catalog, beta)?;
    Ok((alpha, nllh_records(catalog.records(), alpha, beta)))
}

/// Records paired with their silica values, validated once.
#[derive(Debug, Clone)]
pub(crate) struct SilicaRecords<'a> {
    pub records: &'a [EruptionRecord],
    pub silica: Vec<f64>,
}

impl<'a> SilicaRecords<'a> {
    pub fn new(catalog: &'a Catalog) -> Result<Self> {
        Ok(SilicaRecords {
            records: catalog.records(),
            silica: catalog.silica()?,
        })
    }

    pub fn nllh(&self, p: &RegressionParams) -> f64 {
        let mut acc = NeumaierSum::new();
        for (r, &x) in self.records.iter().zip(&self.silica) {
            let (a, b) = p.scaled(x);
            acc.add(record_term(r, a, b));
        }
        acc.value()
    }

    pub fn profile_alpha(&self, beta: f64, gamma_alpha: f64, gamma_beta: f64) -> f64 {
        let n1 = self.records.iter().filter(|r| !r.censored).count() as f64;
        let mut acc = NeumaierSum::new();
        for (r, &x) in self.records.iter().zip(&self.silica) {
            let d = x - SILICA_CENTER;
            acc.add((gamma_alpha * d).exp() * (r.duration * (-gamma_beta * d).exp() / beta).ln_1p());
        }
        n1 / acc.value()
    }
}

/// Regression negative log-likelihood; every record must carry silica.
pub fn nllh_regression(catalog: &Catalog, p: &RegressionParams) -> Result<f64> {
    Ok(SilicaRecords::new(catalog)?.nllh(p))
}

/// Conditional MLE of the baseline `α` given `(β, γ_α, γ_β)`:
/// `n₁ / Σ exp(γ_α(xᵢ−60)) log(1 + tᵢ exp(−γ_β(xᵢ−60))/β)`.
pub fn profile_alpha_regression(
    catalog: &Catalog,
    beta: f64,
    gamma_alpha: f64,
    gamma_beta: f64,
) -> Result<f64> {
    require_uncensored(catalog.n_uncensored())?;
    RegressionParams::new(1.0, beta, gamma_alpha, gamma_beta)?;
    Ok(SilicaRecords::new(catalog)?.profile_alpha(beta, gamma_alpha, gamma_beta))
}

/// Censored exponential negative log-likelihood `λ Σ tᵢ − n₁ log λ`.
pub fn nllh_exponential(catalog: &Catalog, p: &ExpParams) -> f64 {
    let lambda = p.lambda();
    let total: NeumaierSum = catalog.records().iter().map(|r| r.duration).collect();
    lambda * total.value() - catalog.n_uncensored() as f64 * lambda.ln()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::CompositionClass;

    fn record(t: f64, censored: bool, silica: Option<f64>) -> EruptionRecord {
        EruptionRecord::new("V", 2000.0, t, censored, CompositionClass::Intermediate, silica).unwrap()
    }

    fn catalog(records: Vec<EruptionRecord>) -> Catalog {
        Catalog::new(records, None).unwrap()
    }

    fn gpa(a: f64, b: f64) -> GPaParams {
        GPaParams::new(a, b).unwrap()
    }

    fn mixed() -> Catalog {
        catalog(vec![
            record(0.3, false, Some(52.0)),
            record(1.7, false, Some(61.5)),
            record(12.0, true, Some(58.0)),
            record(4.2, false, Some(66.0)),
            record(0.05, false, Some(55.0)),
            record(30.0, true, Some(63.0)),
        ])
    }

    #[test]
    fn aggregate_single_records() {
        let ln2 = std::f64::consts::LN_2;
        let c = catalog(vec![record(1.0, false, None)]);
        assert!((nllh_aggregate(&c, &gpa(1.0, 1.0)) - 2.0 * ln2).abs() < 1e-15);
        let c = catalog(vec![record(1.0, true, None)]);
        assert!((nllh_aggregate(&c, &gpa(1.0, 1.0)) - ln2).abs() < 1e-15);
    }

    #[test]
    fn profile_alpha_closed_forms() {
        let ln2 = std::f64::consts::LN_2;
        let beta = 2.5;
        let c = catalog(vec![record(beta, false, None)]);
        assert!((profile_alpha(&c, beta).unwrap() - 1.0 / ln2).abs() < 1e-14);
        let c = catalog(vec![record(beta, false, None), record(3.0 * beta, false, None)]);
        assert!((profile_alpha(&c, beta).unwrap() - 2.0 / (3.0 * ln2)).abs() < 1e-14);
        let c = catalog(vec![record(1.0, true, None)]);
        assert!(matches!(profile_alpha(&c, 1.0), Err(Error::InsufficientData(_))));
    }

    #[test]
    fn profile_alpha_is_stationary_and_convex() {
        let c = mixed();
        for beta in [0.1, 0.7, 3.0, 40.0] {
            let a = profile_alpha(&c, beta).unwrap();
            let f = |alpha: f64| nllh_aggregate(&c, &gpa(alpha, beta));
            let h = 1e-6;
            let d1 = (f(a + h) - f(a - h)) / (2.0 * h);
            assert!(d1.abs() < 1e-8, "beta={beta} derivative {d1}");
            // Second difference in log α.
            let g = |la: f64| f(la.exp());
            let la = a.ln();
            let d2 = g(la + 1e-3) - 2.0 * g(la) + g(la - 1e-3);
            assert!(d2 > 0.0);
        }
    }

    #[test]
    fn regression_with_zero_slopes_is_the_aggregate_model() {
        let c = mixed();
        for (a, b) in [(0.65, 0.7), (2.0, 0.1), (0.2, 50.0)] {
            let reg = RegressionParams::new(a, b, 0.0, 0.0).unwrap();
            assert_eq!(nllh_regression(&c, &reg).unwrap(), nllh_aggregate(&c, &gpa(a, b)));
            assert_eq!(
                profile_alpha_regression(&c, b, 0.0, 0.0).unwrap(),
                profile_alpha(&c, b).unwrap()
            );
        }
    }

    #[test]
    fn regression_single_record() {
        let c = catalog(vec![record(1.0, false, Some(61.0))]);
        let p = RegressionParams::new(1.0, 1.0, 0.0, std::f64::consts::LN_2).unwrap();
        let expected = 2.0 * 1.5_f64.ln() + 2.0_f64.ln();
        assert!((nllh_regression(&c, &p).unwrap() - expected).abs() < 1e-14);
        let c = catalog(vec![record(0.8, false, Some(60.0))]);
        let a = profile_alpha_regression(&c, 0.8, 0.3, -0.2).unwrap();
        assert!((a - 1.0 / std::f64::consts::LN_2).abs() < 1e-14);
    }

    #[test]
    fn regression_profile_is_stationary() {
        let c = mixed();
        for (b, ga, gb) in [(0.7, 0.04, 0.13), (2.0, -0.1, 0.05)] {
            let a = profile_alpha_regression(&c, b, ga, gb).unwrap();
            let f = |alpha: f64| nllh_regression(&c, &RegressionParams::new(alpha, b, ga, gb).unwrap()).unwrap();
            let h = 1e-5;
            assert!(((f(a + h) - f(a - h)) / (2.0 * h)).abs() < 1e-8);
        }
    }

    #[test]
    fn regression_requires_silica() {
        let c = catalog(vec![record(1.0, false, Some(60.0)), record(2.0, false, None)]);
        let p = RegressionParams::new(1.0, 1.0, 0.0, 0.0).unwrap();
        match nllh_regression(&c, &p) {
            Err(Error::MissingSilica { index, .. }) => assert_eq!(index, 1),
            other => panic!("unexpected {other:?}"),
        }
        assert!(profile_alpha_regression(&c, 1.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn exponential_values_and_mle() {
        let c = catalog(vec![record(1.0, false, None)]);
        assert_eq!(nllh_exponential(&c, &ExpParams::new(1.0).unwrap()), 1.0);
        let c = catalog(vec![record(2.0, true, None)]);
        assert_eq!(nllh_exponential(&c, &ExpParams::new(0.5).unwrap()), 1.0);

        let c = mixed();
        let total: f64 = c.records().iter().map(|r| r.duration).sum();
        let lambda = c.n_uncensored() as f64 / total;
        let f = |l: f64| nllh_exponential(&c, &ExpParams::new(l).unwrap());
        let h = 1e-6;
        assert!(((f(lambda + h) - f(lambda - h)) / (2.0 * h)).abs() < 1e-8);
    }

    #[test]
    fn censoring_flip_changes_nllh_by_log_hazard() {
        let base = mixed();
        let (a, b) = (0.8, 1.3);
        let before = nllh_aggregate(&base, &gpa(a, b));
        let mut records = base.records().to_vec();
        let t = records[1].duration;
        records[1].censored = true;
        let after = nllh_aggregate(&catalog(records), &gpa(a, b));
        let log_hazard = (a / b).ln() - (t / b).ln_1p();
        assert!((after - before - log_hazard).abs() < 1e-12);
    }
}
