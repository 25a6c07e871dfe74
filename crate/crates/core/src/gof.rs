//! Chi-square goodness of fit with bins that are equiprobable under the
//! fitted model.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pareto::DurationModel;

/// Bin count giving 10 degrees of freedom for a two-parameter fit and 11 for
/// a one-parameter fit.
pub const DEFAULT_BINS: usize = 13;

/// Expected counts below this trigger a validity warning.
pub const MIN_EXPECTED_COUNT: f64 = 5.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GofReport {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
    pub n_bins: usize,
    /// Interior edges; bin `j` covers `(edges[j-1], edges[j]]`.
    pub bin_edges: Vec<f64>,
    pub observed: Vec<usize>,
    pub expected: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

/// Interior edges at the model quantiles `j / n_bins`, together with the
/// common expected count `n / n_bins`.
pub fn equiprobable_bins<M: DurationModel + ?Sized>(
    model: &M,
    n: usize,
    n_bins: usize,
) -> Result<(Vec<f64>, f64)> {
    if n_bins < 2 {
        return Err(Error::Usage(format!("need at least 2 bins, got {n_bins}")));
    }
    let edges = (1..n_bins)
        .map(|j| model.quantile(j as f64 / n_bins as f64))
        .collect::<Result<Vec<_>>>()?;
    Ok((edges, n as f64 / n_bins as f64))
}

/// Pearson statistic `Σ (O − E)² / E`.
pub fn chisq_statistic(observed: &[usize], expected: &[f64]) -> Result<f64> {
    if observed.len() != expected.len() {
        return Err(Error::Usage(format!(
            "{} observed counts but {} expected",
            observed.len(),
            expected.len()
        )));
    }
    if let Some(e) = expected.iter().find(|&&e| e <= 0.0 || !e.is_finite()) {
        return Err(Error::Usage(format!("expected count must be positive, got {e}")));
    }
    Ok(observed
        .iter()
        .zip(expected)
        .map(|(&o, &e)| {
            let d = o as f64 - e;
            d * d / e
        })
        .sum())
}

/// Upper tail `P[χ²_dof > x] = Q(dof/2, x/2)`.
pub fn chisq_tail(x: f64, dof: usize) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    statrs::function::gamma::gamma_ur(dof as f64 / 2.0, x / 2.0)
}

/// Tests completed durations against a fitted model with `k_fitted`
/// parameters estimated from the same data.
pub fn gof_test<M: DurationModel + ?Sized>(
    durations: &[f64],
    model: &M,
    k_fitted: usize,
    n_bins: usize,
) -> Result<GofReport> {
    if durations.is_empty() {
        return Err(Error::InsufficientData("no durations to test".into()));
    }
    if n_bins < 1 + k_fitted + 1 {
        return Err(Error::Usage(format!(
            "{n_bins} bins leave no degrees of freedom after {k_fitted} fitted parameters"
        )));
    }
    let dof = n_bins - 1 - k_fitted;
    let (edges, expected_each) = equiprobable_bins(model, durations.len(), n_bins)?;
    let mut observed = vec![0usize; n_bins];
    for &t in durations {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::Usage(format!("duration must be positive, got {t}")));
        }
        observed[edges.partition_point(|&e| e < t)] += 1;
    }
    let expected = vec![expected_each; n_bins];
    let statistic = chisq_statistic(&observed, &expected)?;
    let mut warnings = Vec::new();
    if expected_each < MIN_EXPECTED_COUNT {
        warnings.push(format!(
            "expected count per bin {expected_each:.2} is below {MIN_EXPECTED_COUNT}; the chi-square approximation may be poor"
        ));
    }
    Ok(GofReport {
        statistic,
        dof,
        p_value: chisq_tail(statistic, dof),
        n_bins,
        bin_edges: edges,
        observed,
        expected,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pareto::{ExpParams, GPaParams};

    #[test]
    fn equiprobable_edges() {
        let g = GPaParams::new(1.0, 1.0).unwrap();
        let (edges, e) = equiprobable_bins(&g, 10, 2).unwrap();
        assert_eq!(edges, vec![1.0]);
        assert_eq!(e, 5.0);
        let (edges, _) = equiprobable_bins(&g, 10, 4).unwrap();
        let want = [1.0 / 3.0, 1.0, 3.0];
        for (a, b) in edges.iter().zip(want) {
            assert!((a - b).abs() < 1e-14);
        }
        let (edges, _) = equiprobable_bins(&ExpParams::new(1.0).unwrap(), 10, 2).unwrap();
        assert!((edges[0] - std::f64::consts::LN_2).abs() < 1e-15);
        assert!(equiprobable_bins(&g, 10, 1).is_err());
    }

    #[test]
    fn statistic_values() {
        assert_eq!(chisq_statistic(&[3, 4], &[3.0, 4.0]).unwrap(), 0.0);
        assert_eq!(chisq_statistic(&[10, 0], &[5.0, 5.0]).unwrap(), 10.0);
        assert!((chisq_statistic(&[8, 12, 10], &[10.0; 3]).unwrap() - 0.8).abs() < 1e-15);
        assert!(chisq_statistic(&[1, 1], &[0.0, 2.0]).is_err());
        assert!(chisq_statistic(&[1], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn tail_values() {
        // References from 40-digit incomplete-gamma evaluation.
        assert!((chisq_tail(14.4, 10) / 0.155_515_615_690_802_4 - 1.0).abs() < 1e-12);
        let p = chisq_tail(151.3, 11);
        assert!((p / 8.084_721_086_046_469e-27 - 1.0).abs() < 1e-10, "{p:e}");
        // A statistic of 151.257 (which rounds to 151.3) has tail 8.25e-27.
        assert!((chisq_tail(151.257, 11) / 8.25e-27 - 1.0).abs() < 1e-3);
        assert_eq!(chisq_tail(0.0, 7), 1.0);
    }

    #[test]
    fn degrees_of_freedom() {
        let g = GPaParams::new(0.65, 0.7).unwrap();
        let data: Vec<f64> = (1..=200).map(|i| g.quantile(i as f64 / 201.0).unwrap()).collect();
        assert_eq!(gof_test(&data, &g, 2, 13).unwrap().dof, 10);
        assert_eq!(gof_test(&data, &g, 1, 13).unwrap().dof, 11);
        assert!(gof_test(&data, &g, 2, 3).is_err());
    }

    #[test]
    fn extreme_misfit() {
        let g = GPaParams::new(1.0, 1.0).unwrap();
        let data = vec![1e6; 500];
        let r = gof_test(&data, &g, 0, 10).unwrap();
        assert_eq!(r.observed[9], 500);
        assert!(r.p_value < 1e-100);
    }

    #[test]
    fn small_samples_warn() {
        let g = GPaParams::new(1.0, 1.0).unwrap();
        let r = gof_test(&[0.5, 1.5, 2.0, 9.0], &g, 0, 3).unwrap();
        assert_eq!(r.warnings.len(), 1);
        assert_eq!(r.observed.iter().sum::<usize>(), 4);
        assert!((r.expected.iter().sum::<f64>() - 4.0).abs() < 1e-9);
    }
}
