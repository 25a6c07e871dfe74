use serde::{Deserialize, Serialize};

use super::PosteriorChain;
use crate::error::{Error, Result};
use crate::numeric::{lag1_autocorrelation, mean, quantile_sorted, sorted, std_dev};

pub const MIN_SUMMARY_DRAWS: usize = 100;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParameterSummary {
    pub name: String,
    pub mean: f64,
    pub sd: f64,
    pub q025: f64,
    pub q25: f64,
    pub q50: f64,
    pub q75: f64,
    pub q975: f64,
    pub lag1_autocorrelation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainSummary {
    pub draws: usize,
    pub acceptance_rate: Option<f64>,
    pub parameters: Vec<ParameterSummary>,
}

/// Empirical moments and quantiles of each parameter.
pub fn chain_summary(chain: &PosteriorChain) -> Result<ChainSummary> {
    if chain.len() < MIN_SUMMARY_DRAWS {
        return Err(Error::InsufficientData(format!(
            "chain summary needs at least {MIN_SUMMARY_DRAWS} draws, got {}",
            chain.len()
        )));
    }
    let parameters = chain
        .parameter_names()
        .iter()
        .enumerate()
        .map(|(i, name)| {
            let col = chain.column(i);
            let s = sorted(col.iter().copied());
            ParameterSummary {
                name: name.to_string(),
                mean: mean(&col),
                sd: std_dev(&col),
                q025: quantile_sorted(&s, 0.025),
                q25: quantile_sorted(&s, 0.25),
                q50: quantile_sorted(&s, 0.5),
                q75: quantile_sorted(&s, 0.75),
                q975: quantile_sorted(&s, 0.975),
                lag1_autocorrelation: lag1_autocorrelation(&col),
            }
        })
        .collect();
    Ok(ChainSummary {
        draws: chain.len(),
        acceptance_rate: chain.acceptance_rate(),
        parameters,
    })
}
