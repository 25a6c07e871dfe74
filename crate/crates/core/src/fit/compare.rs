use serde::{Deserialize, Serialize};

use super::FitResult;
use crate::error::{Error, Result};

/// `(AIC, BIC) = (2k + 2ℓ, k log n + 2ℓ)` for negative log-likelihood `ℓ`.
pub fn information_criteria(nllh: f64, k: usize, n: usize) -> (f64, f64) {
    let k = k as f64;
    (2.0 * k + 2.0 * nllh, k * (n as f64).ln() + 2.0 * nllh)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelScore {
    pub label: String,
    pub nllh: f64,
    pub k: usize,
    pub n: usize,
    pub aic: f64,
    pub bic: f64,
}

impl ModelScore {
    pub fn new(label: impl Into<String>, nllh: f64, k: usize, n: usize) -> Self {
        let (aic, bic) = information_criteria(nllh, k, n);
        ModelScore {
            label: label.into(),
            nllh,
            k,
            n,
            aic,
            bic,
        }
    }

    /// Combines fits over disjoint parts of one catalog (the grouped model):
    /// likelihoods, parameter counts and record counts add.
    pub fn from_fits(label: impl Into<String>, fits: &[FitResult]) -> Result<Self> {
        if fits.is_empty() {
            return Err(Error::Usage("no fits to score".into()));
        }
        let nllh = fits.iter().map(|f| f.nllh_at_mle).sum();
        let k = fits.iter().map(|f| f.k).sum();
        let n = fits.iter().map(|f| f.n).sum();
        Ok(ModelScore::new(label, nllh, k, n))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelComparison {
    pub models: Vec<ModelScore>,
    pub best_aic: String,
    pub best_bic: String,
}

/// Tabulates AIC/BIC; all scores must describe the same `n` records.
pub fn compare_models(models: Vec<ModelScore>) -> Result<ModelComparison> {
    let first = models
        .first()
        .ok_or_else(|| Error::Usage("no models to compare".into()))?;
    if let Some(bad) = models.iter().find(|m| m.n != first.n) {
        return Err(Error::Usage(format!(
            "model {:?} was fit to {} records but {:?} to {}",
            bad.label, bad.n, first.label, first.n
        )));
    }
    let best = |key: fn(&ModelScore) -> f64| {
        models
            .iter()
            .min_by(|a, b| key(a).total_cmp(&key(b)))
            .map(|m| m.label.clone())
            .unwrap_or_default()
    };
    let best_aic = best(|m| m.aic);
    let best_bic = best(|m| m.bic);
    Ok(ModelComparison {
        models,
        best_aic,
        best_bic,
    })
}
