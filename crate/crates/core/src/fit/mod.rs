//! Maximum-likelihood fitting of the aggregate, grouped, regression and
//! exponential models, with inverse-Hessian standard errors.
//!
//! The aggregate and grouped fits profile out `α` and search `log β` over
//! `[log 1e-4, log 1e4]`; the regression fit profiles out the baseline `α`
//! and runs a restarted simplex search over `(log β, γ_α, γ_β)`.

mod compare;
mod hessian;

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::catalog::{Catalog, CompositionClass};
use crate::error::{Error, Result};
use crate::likelihood::{self, nllh_records, profile_alpha_records, RegressionParams, SilicaRecords};
use crate::optim::{grid_golden, nelder_mead, NelderMeadOptions};
use crate::pareto::{ExpParams, GPaParams};

pub use compare::{compare_models, information_criteria, ModelComparison, ModelScore};
pub use hessian::{numerical_hessian, standard_errors, Scale, HESSIAN_STEP};

/// Bracket of the one-dimensional scale search, in years.
pub const BETA_BRACKET: (f64, f64) = (1e-4, 1e4);
/// Points scanned before golden-section refinement.
pub const BETA_GRID_POINTS: usize = 100;
pub const BETA_REL_TOL: f64 = 1e-8;

pub const REGRESSION_FTOL: f64 = 1e-10;
pub const REGRESSION_MAX_EVALUATIONS: usize = 50_000;
pub const REGRESSION_RESTARTS: usize = 5;
const REGRESSION_JITTER_SEED: u64 = 0x5EED_0060;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Aggregate,
    GroupedClass,
    Regression,
    Exponential,
}

impl ModelKind {
    /// Number of free parameters.
    pub fn k(self) -> usize {
        match self {
            ModelKind::Aggregate | ModelKind::GroupedClass => 2,
            ModelKind::Regression => 4,
            ModelKind::Exponential => 1,
        }
    }

    pub fn parameter_names(self) -> &'static [&'static str] {
        match self {
            ModelKind::Aggregate | ModelKind::GroupedClass => &["alpha", "beta"],
            ModelKind::Regression => &["alpha", "beta", "gamma_alpha", "gamma_beta"],
            ModelKind::Exponential => &["lambda"],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    #[serde(rename = "gpa")]
    GPa,
    Exponential,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub model_kind: ModelKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub class: Option<CompositionClass>,
    pub estimates: BTreeMap<String, f64>,
    /// Absent when the Hessian at the estimate is not positive definite.
    pub standard_errors: Option<BTreeMap<String, f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub se_diagnostic: Option<String>,
    pub nllh_at_mle: f64,
    pub n: usize,
    pub n1: usize,
    pub k: usize,
    pub converged: bool,
    pub iterations: usize,
}

impl FitResult {
    #[allow(clippy::too_many_arguments)]
    fn new(
        model_kind: ModelKind,
        class: Option<CompositionClass>,
        theta: &[f64],
        ses: Result<Vec<f64>>,
        nllh: f64,
        catalog: &Catalog,
        converged: bool,
        iterations: usize,
    ) -> Self {
        let names = model_kind.parameter_names();
        let named = |v: &[f64]| -> BTreeMap<String, f64> {
            names.iter().map(|s| s.to_string()).zip(v.iter().copied()).collect()
        };
        let (standard_errors, se_diagnostic) = match ses {
            Ok(v) => (Some(named(&v)), None),
            Err(e) => (None, Some(e.to_string())),
        };
        FitResult {
            model_kind,
            class,
            estimates: named(theta),
            standard_errors,
            se_diagnostic,
            nllh_at_mle: nllh,
            n: catalog.len(),
            n1: catalog.n_uncensored(),
            k: model_kind.k(),
            converged,
            iterations,
        }
    }

    pub fn estimate(&self, name: &str) -> Option<f64> {
        self.estimates.get(name).copied()
    }

    pub fn standard_error(&self, name: &str) -> Option<f64> {
        self.standard_errors.as_ref()?.get(name).copied()
    }

    pub fn aic(&self) -> f64 {
        information_criteria(self.nllh_at_mle, self.k, self.n).0
    }

    pub fn bic(&self) -> f64 {
        information_criteria(self.nllh_at_mle, self.k, self.n).1
    }

    fn need(&self, name: &str) -> Result<f64> {
        self.estimate(name)
            .ok_or_else(|| Error::Usage(format!("{:?} fit has no {name} estimate", self.model_kind)))
    }

    pub fn gpa_params(&self) -> Result<GPaParams> {
        match self.model_kind {
            ModelKind::Aggregate | ModelKind::GroupedClass => {
                GPaParams::new(self.need("alpha")?, self.need("beta")?)
            }
            other => Err(Error::Usage(format!("{other:?} fit is not a single generalized Pareto law"))),
        }
    }

    pub fn exp_params(&self) -> Result<ExpParams> {
        ExpParams::new(self.need("lambda")?)
    }

    pub fn regression_params(&self) -> Result<RegressionParams> {
        RegressionParams::new(
            self.need("alpha")?,
            self.need("beta")?,
            self.need("gamma_alpha")?,
            self.need("gamma_beta")?,
        )
    }
}

fn require_n1(catalog: &Catalog, needed: usize, what: &str) -> Result<()> {
    let n1 = catalog.n_uncensored();
    if n1 < needed {
        Err(Error::InsufficientData(format!(
            "{what} needs at least {needed} completed eruptions, found {n1}"
        )))
    } else {
        Ok(())
    }
}

fn gpa_fit(catalog: &Catalog, kind: ModelKind, class: Option<CompositionClass>) -> Result<FitResult> {
    require_n1(catalog, 2, "a generalized Pareto fit")?;
    let records = catalog.records();
    let profile = |log_beta: f64| {
        let beta = log_beta.exp();
        nllh_records(records, profile_alpha_records(records, beta), beta)
    };
    let (lo, hi) = (BETA_BRACKET.0.ln(), BETA_BRACKET.1.ln());
    let min = grid_golden(profile, lo, hi, BETA_GRID_POINTS, BETA_REL_TOL);
    if !min.value.is_finite() {
        return Err(Error::Optimizer("profile likelihood is not finite anywhere in the scale bracket".into()));
    }
    let beta = min.x.exp();
    let alpha = profile_alpha_records(records, beta);
    let nllh = nllh_records(records, alpha, beta);
    let ses = standard_errors(|t| nllh_records(records, t[0], t[1]), &[alpha, beta], &[Scale::Log; 2]);
    Ok(FitResult::new(kind, class, &[alpha, beta], ses, nllh, catalog, min.converged, min.evaluations))
}

/// Aggregate generalized Pareto MLE over the whole catalog.
pub fn fit_aggregate(catalog: &Catalog) -> Result<FitResult> {
    gpa_fit(catalog, ModelKind::Aggregate, None)
}

/// Censored exponential MLE `λ̂ = n₁ / Σ tᵢ`.
pub fn fit_exponential(catalog: &Catalog) -> Result<FitResult> {
    exponential_fit(catalog, None)
}

fn exponential_fit(catalog: &Catalog, class: Option<CompositionClass>) -> Result<FitResult> {
    require_n1(catalog, 1, "an exponential fit")?;
    let total: f64 = crate::numeric::compensated_sum(catalog.records().iter().map(|r| r.duration));
    let lambda = catalog.n_uncensored() as f64 / total;
    let nllh_at = |l: f64| likelihood::nllh_exponential(catalog, &ExpParams::new(l).expect("positive rate"));
    let nllh = nllh_at(lambda);
    let ses = standard_errors(
        |t| if t[0] > 0.0 && t[0].is_finite() { nllh_at(t[0]) } else { f64::INFINITY },
        &[lambda],
        &[Scale::Log],
    );
    Ok(FitResult::new(ModelKind::Exponential, class, &[lambda], ses, nllh, catalog, true, 1))
}

/// Fits one composition class on its own.
pub fn fit_grouped(catalog: &Catalog, class: CompositionClass, family: Family) -> Result<FitResult> {
    let sub = catalog.for_class(class).map_err(|e| match e {
        Error::EmptyCatalog => Error::InsufficientData(format!("no {class} eruptions in catalog")),
        other => other,
    })?;
    match family {
        Family::GPa => gpa_fit(&sub, ModelKind::GroupedClass, Some(class)),
        Family::Exponential => exponential_fit(&sub, Some(class)),
    }
}

/// Log-linear silica regression MLE.
pub fn fit_regression(catalog: &Catalog) -> Result<FitResult> {
    let data = SilicaRecords::new(catalog)?;
    require_n1(catalog, 4, "the regression fit")?;

    let objective = |z: &[f64]| {
        let beta = z[0].exp();
        let alpha = data.profile_alpha(beta, z[1], z[2]);
        if !(alpha > 0.0 && alpha.is_finite() && beta.is_finite() && beta > 0.0) {
            return f64::INFINITY;
        }
        data.nllh(&RegressionParams {
            alpha,
            beta,
            gamma_alpha: z[1],
            gamma_beta: z[2],
        })
    };

    let opts = NelderMeadOptions {
        ftol: REGRESSION_FTOL,
        max_evaluations: REGRESSION_MAX_EVALUATIONS,
        initial_step: vec![0.5, 0.05, 0.05],
    };

    // The aggregate optimum embedded at zero slopes is always among the
    // starts, so the regression fit can never be worse than the nested model.
    let aggregate = gpa_fit(catalog, ModelKind::Aggregate, None)?;
    let mut starts = vec![vec![0.0, 0.0, 0.0], vec![aggregate.need("beta")?.ln(), 0.0, 0.0]];
    let mut rng = ChaCha8Rng::seed_from_u64(REGRESSION_JITTER_SEED);
    for _ in 0..REGRESSION_RESTARTS {
        let mut jitter = |scale: f64| scale * rng.sample::<f64, _>(StandardNormal);
        starts.push(vec![jitter(1.0), jitter(0.05), jitter(0.05)]);
    }

    let mut evaluations = 0;
    let mut best: Option<crate::optim::MinimumNd> = None;
    for start in &starts {
        let m = nelder_mead(objective, start, &opts);
        evaluations += m.evaluations;
        if best.as_ref().is_none_or(|b| m.value < b.value) {
            best = Some(m);
        }
    }
    let mut best = best.expect("at least one start");
    // Polish from the best vertex with a fresh simplex.
    let polished = nelder_mead(objective, &best.x, &opts);
    evaluations += polished.evaluations;
    if polished.value <= best.value {
        best = crate::optim::MinimumNd {
            converged: polished.converged,
            ..polished
        };
    }
    if !best.value.is_finite() {
        return Err(Error::Optimizer("regression likelihood is not finite at any visited point".into()));
    }

    let beta = best.x[0].exp();
    let (gamma_alpha, gamma_beta) = (best.x[1], best.x[2]);
    let alpha = data.profile_alpha(beta, gamma_alpha, gamma_beta);
    let theta = [alpha, beta, gamma_alpha, gamma_beta];
    let nllh = data.nllh(&RegressionParams {
        alpha,
        beta,
        gamma_alpha,
        gamma_beta,
    });
    let ses = standard_errors(
        |t| {
            data.nllh(&RegressionParams {
                alpha: t[0],
                beta: t[1],
                gamma_alpha: t[2],
                gamma_beta: t[3],
            })
        },
        &theta,
        &[Scale::Log, Scale::Log, Scale::Linear, Scale::Linear],
    );
    Ok(FitResult::new(
        ModelKind::Regression,
        None,
        &theta,
        ses,
        nllh,
        catalog,
        best.converged,
        evaluations,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::EruptionRecord;
    use crate::likelihood::{nllh_aggregate, profile_alpha};

    fn catalog(ts: &[(f64, bool, f64)]) -> Catalog {
        let classes = [CompositionClass::Mafic, CompositionClass::Intermediate, CompositionClass::Evolved];
        Catalog::new(
            ts.iter()
                .enumerate()
                .map(|(i, &(t, c, x))| {
                    EruptionRecord::new(format!("V{i}"), 2000.0, t, c, classes[i % 3], Some(x)).unwrap()
                })
                .collect(),
            None,
        )
        .unwrap()
    }

    fn small() -> Catalog {
        catalog(&[
            (0.2, false, 50.0),
            (0.5, false, 58.0),
            (0.9, false, 67.0),
            (1.4, false, 50.0),
            (2.7, false, 58.0),
            (4.1, true, 67.0),
            (6.0, false, 50.0),
            (0.1, false, 58.0),
            (19.7, true, 67.0),
            (0.7, false, 58.0),
            (3.3, false, 67.0),
            (0.05, false, 50.0),
        ])
    }

    #[test]
    fn aggregate_fit_is_profile_consistent_and_beats_the_audit_grid() {
        let c = small();
        let fit = fit_aggregate(&c).unwrap();
        assert!(fit.converged);
        assert_eq!(fit.k, 2);
        let beta = fit.estimate("beta").unwrap();
        let alpha = fit.estimate("alpha").unwrap();
        assert!((alpha - profile_alpha(&c, beta).unwrap()).abs() < 1e-10);
        for i in 0..100 {
            let lb = BETA_BRACKET.0.ln() + (BETA_BRACKET.1 / BETA_BRACKET.0).ln() * i as f64 / 99.0;
            let b = lb.exp();
            let a = profile_alpha(&c, b).unwrap();
            assert!(fit.nllh_at_mle <= nllh_aggregate(&c, &GPaParams::new(a, b).unwrap()));
        }
        let se = fit.standard_errors.as_ref().unwrap();
        assert!(se["alpha"] > 0.0 && se["beta"] > 0.0);
    }

    #[test]
    fn aggregate_needs_two_completed() {
        let c = catalog(&[(1.0, false, 60.0), (2.0, true, 60.0)]);
        assert!(matches!(fit_aggregate(&c), Err(Error::InsufficientData(_))));
    }

    #[test]
    fn fit_is_deterministic() {
        let c = small();
        assert_eq!(fit_aggregate(&c).unwrap(), fit_aggregate(&c).unwrap());
        assert_eq!(fit_regression(&c).unwrap(), fit_regression(&c).unwrap());
    }

    #[test]
    fn regression_nests_aggregate() {
        let c = small();
        let agg = fit_aggregate(&c).unwrap();
        let reg = fit_regression(&c).unwrap();
        assert_eq!(reg.k, 4);
        assert!(reg.nllh_at_mle <= agg.nllh_at_mle + 1e-6);
    }

    #[test]
    fn regression_needs_silica() {
        let mut records = small().records().to_vec();
        records[3].silica_pct = None;
        let c = Catalog::new(records, None).unwrap();
        assert!(matches!(fit_regression(&c), Err(Error::MissingSilica { index: 3, .. })));
    }

    #[test]
    fn grouped_fits() {
        let c = small();
        let fit = fit_grouped(&c, CompositionClass::Intermediate, Family::GPa).unwrap();
        assert_eq!(fit.model_kind, ModelKind::GroupedClass);
        assert_eq!(fit.class, Some(CompositionClass::Intermediate));
        assert_eq!(fit.n, 4);
        let e = fit_grouped(&c, CompositionClass::Evolved, Family::Exponential).unwrap();
        assert_eq!(e.k, 1);
        let sub = c.for_class(CompositionClass::Evolved).unwrap();
        let total: f64 = sub.records().iter().map(|r| r.duration).sum();
        let lambda = sub.n_uncensored() as f64 / total;
        assert!((e.estimate("lambda").unwrap() - lambda).abs() < 1e-15);
        let se = e.standard_error("lambda").unwrap();
        assert!((se - lambda / (sub.n_uncensored() as f64).sqrt()).abs() < 1e-3 * se);

        let only_mafic = catalog(&[(1.0, false, 50.0)]);
        assert!(matches!(
            fit_grouped(&only_mafic, CompositionClass::Evolved, Family::GPa),
            Err(Error::InsufficientData(_))
        ));
    }

    #[test]
    fn serde_round_trip() {
        let fit = fit_aggregate(&small()).unwrap();
        let json = serde_json::to_string(&fit).unwrap();
        let back: FitResult = serde_json::from_str(&json).unwrap();
        assert_eq!(back, fit);
        assert_eq!(back.gpa_params().unwrap().alpha(), fit.estimate("alpha").unwrap());
        assert!(back.regression_params().is_err());
    }
}
