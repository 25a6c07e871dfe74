use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Independent Gamma priors `α ~ Ga(a, b)`, `β ~ Ga(c, d)` (shape, rate).
/// All zeros gives the scale-invariant reference prior `1/α · 1/β`.
/// Regression slopes always get flat priors.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PriorSpec {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl PriorSpec {
    pub fn reference() -> Self {
        PriorSpec::default()
    }

    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        for (name, v) in [("a", a), ("b", b), ("c", c), ("d", d)] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::invalid(name, v, "prior hyperparameters must be non-negative"));
            }
        }
        Ok(PriorSpec { a, b, c, d })
    }

    /// Unnormalized log density of the `(α, β)` prior.
    pub fn log_density(&self, alpha: f64, beta: f64) -> f64 {
        (self.a - 1.0) * alpha.ln() - self.b * alpha + (self.c - 1.0) * beta.ln() - self.d * beta
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Propriety {
    pub proper: bool,
    pub finite_moments: bool,
}

/// Integrability of the `(α, β)` posterior with `n1` completed eruptions.
///
/// Near `β → 0` the marginal posterior behaves like
/// `β^(c-1) / log(1/β)^(a+n₁)`, and near `β → ∞` like `β^(c-n₁-1) e^(-dβ)`,
/// so the posterior is proper iff `(c > 0 or a + n₁ > 1)` and
/// `(d > 0 or n₁ > c)`; means and variances are finite if also
/// `d > 0 or n₁ > c + 2`.
pub fn propriety_check(prior: &PriorSpec, n1: usize) -> Propriety {
    let n1 = n1 as f64;
    let near_zero = prior.c > 0.0 || prior.a + n1 > 1.0;
    let near_infinity = prior.d > 0.0 || n1 > prior.c;
    let proper = near_zero && near_infinity;
    Propriety {
        proper,
        finite_moments: proper && (prior.d > 0.0 || n1 > prior.c + 2.0),
    }
}

/// Human-readable reason for an improper posterior, if any.
pub(crate) fn impropriety_reason(prior: &PriorSpec, n1: usize) -> Option<String> {
    let n = n1 as f64;
    if !(prior.c > 0.0 || prior.a + n > 1.0) {
        return Some(format!(
            "integrability near beta = 0 needs c > 0 or a + n1 > 1 (c = {}, a = {}, n1 = {n1})",
            prior.c, prior.a
        ));
    }
    if !(prior.d > 0.0 || n > prior.c) {
        return Some(format!(
            "integrability as beta grows needs d > 0 or n1 > c (d = {}, c = {}, n1 = {n1})",
            prior.d, prior.c
        ));
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_prior_cases() {
        let r = PriorSpec::reference();
        assert_eq!(propriety_check(&r, 163), Propriety { proper: true, finite_moments: true });
        assert!(!propriety_check(&r, 1).proper);
        assert_eq!(propriety_check(&r, 2), Propriety { proper: true, finite_moments: false });
        assert!(propriety_check(&r, 3).finite_moments);
        assert!(impropriety_reason(&r, 1).unwrap().contains("a + n1 > 1"));
        assert!(impropriety_reason(&r, 3).is_none());
    }

    #[test]
    fn proper_priors_give_proper_posteriors() {
        let p = PriorSpec::new(1.0, 1.0, 1.0, 1.0).unwrap();
        assert_eq!(propriety_check(&p, 0), Propriety { proper: true, finite_moments: true });
    }

    #[test]
    fn reference_log_density() {
        let r = PriorSpec::reference();
        assert_eq!(r.log_density(1.0, 1.0), 0.0);
        assert!((r.log_density(2.0, 3.0) + 6.0_f64.ln()).abs() < 1e-15);
        assert!(PriorSpec::new(-1.0, 0.0, 0.0, 0.0).is_err());
    }
}
