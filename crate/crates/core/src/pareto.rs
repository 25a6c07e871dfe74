//! Generalized Pareto and exponential duration distributions.
//!
//! `GPa(α, β)` has survival `(1 + t/β)^(-α)` on `t > 0`. All tail quantities
//! are evaluated in log space so that very large `t/β` and small `α` stay
//! accurate.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Mean of a duration distribution, which is infinite for heavy tails (`α ≤ 1`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mean {
    Finite(f64),
    Infinite,
}

/// Common interface of the fitted duration families.
pub trait DurationModel {
    fn survival(&self, t: f64) -> Result<f64>;
    fn quantile(&self, q: f64) -> Result<f64>;
    /// Number of free parameters.
    fn n_params(&self) -> usize;
}

fn check_time(t: f64) -> Result<()> {
    if t >= 0.0 {
        Ok(())
    } else {
        Err(Error::invalid("t", t, "must be non-negative"))
    }
}

fn check_probability(q: f64) -> Result<()> {
    if (0.0..1.0).contains(&q) {
        Ok(())
    } else {
        Err(Error::invalid("q", q, "must lie in [0, 1)"))
    }
}

fn check_uniform(u: f64) -> Result<()> {
    if u > 0.0 && u < 1.0 {
        Ok(())
    } else {
        Err(Error::invalid("u", u, "must lie in (0, 1)"))
    }
}

/// Shape `alpha` and scale `beta` (years) of a generalized Pareto law.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawGPa")]
pub struct GPaParams {
    alpha: f64,
    beta: f64,
}

#[derive(Deserialize)]
struct RawGPa {
    alpha: f64,
    beta: f64,
}

impl TryFrom<RawGPa> for GPaParams {
    type Error = Error;

    fn try_from(raw: RawGPa) -> Result<Self> {
        GPaParams::new(raw.alpha, raw.beta)
    }
}

impl GPaParams {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::invalid("alpha", alpha, "must be positive and finite"));
        }
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(Error::invalid("beta", beta, "must be positive and finite"));
        }
        Ok(GPaParams { alpha, beta })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// `log P[T > t] = -α log1p(t/β)`.
    pub fn log_survival(&self, t: f64) -> Result<f64> {
        check_time(t)?;
        Ok(-self.alpha * (t / self.beta).ln_1p())
    }

    pub fn survival(&self, t: f64) -> Result<f64> {
        self.log_survival(t).map(f64::exp)
    }

    pub fn log_density(&self, t: f64) -> Result<f64> {
        check_time(t)?;
        Ok((self.alpha / self.beta).ln() - (self.alpha + 1.0) * (t / self.beta).ln_1p())
    }

    pub fn density(&self, t: f64) -> Result<f64> {
        self.log_density(t).map(f64::exp)
    }

    /// Inverse CDF: `β[(1 - q)^(-1/α) - 1]`.
    pub fn quantile(&self, q: f64) -> Result<f64> {
        check_probability(q)?;
        Ok(self.beta * (-(-q).ln_1p() / self.alpha).exp_m1())
    }

    pub fn median(&self) -> f64 {
        self.beta * (std::f64::consts::LN_2 / self.alpha).exp_m1()
    }

    pub fn mean(&self) -> Mean {
        if self.alpha > 1.0 {
            Mean::Finite(self.beta / (self.alpha - 1.0))
        } else {
            Mean::Infinite
        }
    }

    /// Distribution of the remaining duration of an eruption already `s`
    /// years old: `GPa(α, β + s)`.
    pub fn condition_on_age(&self, s: f64) -> Result<GPaParams> {
        if !(s >= 0.0 && s.is_finite()) {
            return Err(Error::invalid("s", s, "age must be non-negative and finite"));
        }
        GPaParams::new(self.alpha, self.beta + s)
    }

    /// Inverse-CDF draw from a uniform variate `u ∈ (0, 1)`: `β(u^(-1/α) - 1)`.
    pub fn sample(&self, u: f64) -> Result<f64> {
        check_uniform(u)?;
        Ok(self.beta * (-u.ln() / self.alpha).exp_m1())
    }
}

impl DurationModel for GPaParams {
    fn survival(&self, t: f64) -> Result<f64> {
        GPaParams::survival(self, t)
    }

    fn quantile(&self, q: f64) -> Result<f64> {
        GPaParams::quantile(self, q)
    }

    fn n_params(&self) -> usize {
        2
    }
}

/// Exponential law with rate `lambda` (1/years).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawExp")]
pub struct ExpParams {
    lambda: f64,
}

#[derive(Deserialize)]
struct RawExp {
    lambda: f64,
}

impl TryFrom<RawExp> for ExpParams {
    type Error = Error;

    fn try_from(raw: RawExp) -> Result<Self> {
        ExpParams::new(raw.lambda)
    }
}

impl ExpParams {
    pub fn new(lambda: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::invalid("lambda", lambda, "must be positive and finite"));
        }
        Ok(ExpParams { lambda })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn survival(&self, t: f64) -> Result<f64> {
        check_time(t)?;
        Ok((-self.lambda * t).exp())
    }

    pub fn density(&self, t: f64) -> Result<f64> {
        check_time(t)?;
        Ok(self.lambda * (-self.lambda * t).exp())
    }

    pub fn quantile(&self, q: f64) -> Result<f64> {
        check_probability(q)?;
        Ok(-(-q).ln_1p() / self.lambda)
    }

    pub fn mean(&self) -> Mean {
        Mean::Finite(1.0 / self.lambda)
    }

    pub fn sample(&self, u: f64) -> Result<f64> {
        check_uniform(u)?;
        Ok(-u.ln() / self.lambda)
    }
}

impl DurationModel for ExpParams {
    fn survival(&self, t: f64) -> Result<f64> {
        ExpParams::survival(self, t)
    }

    fn quantile(&self, q: f64) -> Result<f64> {
        ExpParams::quantile(self, q)
    }

    fn n_params(&self) -> usize {
        1
    }
}

/// Free-function forms of the exponential primitives.
pub fn exp_survival(p: &ExpParams, t: f64) -> Result<f64> {
    p.survival(t)
}

pub fn exp_quantile(p: &ExpParams, q: f64) -> Result<f64> {
    p.quantile(q)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gpa(a: f64, b: f64) -> GPaParams {
        GPaParams::new(a, b).unwrap()
    }

    #[test]
    fn construction_rejects_non_positive() {
        assert!(GPaParams::new(0.0, 1.0).is_err());
        assert!(GPaParams::new(1.0, -1.0).is_err());
        assert!(GPaParams::new(f64::NAN, 1.0).is_err());
        assert!(ExpParams::new(0.0).is_err());
        assert!(serde_json::from_str::<GPaParams>(r#"{"alpha":-1,"beta":1}"#).is_err());
    }

    #[test]
    fn survival_values() {
        assert_eq!(gpa(1.0, 1.0).survival(1.0).unwrap(), 0.5);
        assert_eq!(gpa(0.3, 7.0).survival(0.0).unwrap(), 1.0);
        // (1 + 10/0.7018)^(-0.6487), evaluated with 50-digit arithmetic.
        let s = gpa(0.6487, 0.7018).survival(10.0).unwrap();
        assert!((s - 0.170_777_229_297_435_13).abs() < 1e-12, "{s}");
        assert!(gpa(1.0, 1.0).survival(-1.0).is_err());
    }

    #[test]
    fn density_values() {
        assert_eq!(gpa(1.0, 1.0).density(0.0).unwrap(), 1.0);
        assert!((gpa(2.0, 1.0).density(1.0).unwrap() - 0.25).abs() < 1e-15);
        assert!(gpa(2.0, 1.0).density(-0.1).is_err());
    }

    #[test]
    fn quantile_values() {
        assert_eq!(gpa(1.0, 1.0).quantile(0.5).unwrap(), 1.0);
        assert_eq!(gpa(0.5, 3.0).quantile(0.0).unwrap(), 0.0);
        let m = gpa(0.6487, 0.7018).quantile(0.5).unwrap();
        assert!((m - 1.341_181_982_332_993).abs() < 1e-12, "{m}");
        assert_eq!(m, gpa(0.6487, 0.7018).median());
        assert!(gpa(1.0, 1.0).quantile(1.0).is_err());
        assert!(gpa(1.0, 1.0).quantile(-0.1).is_err());
    }

    #[test]
    fn conditioning() {
        let p = gpa(0.6487, 0.7018);
        let c = p.condition_on_age(19.7).unwrap();
        assert_eq!(c.alpha(), 0.6487);
        assert!((c.beta() - 20.4018).abs() < 1e-12);
        assert_eq!(p.condition_on_age(0.0).unwrap(), p);
        let twice = p.condition_on_age(2.0).unwrap().condition_on_age(3.5).unwrap();
        assert!((twice.beta() - p.condition_on_age(5.5).unwrap().beta()).abs() < 1e-14);
        assert!(p.condition_on_age(-1.0).is_err());
    }

    #[test]
    fn sampling_values() {
        assert_eq!(gpa(1.0, 1.0).sample(0.5).unwrap(), 1.0);
        assert!((gpa(0.5, 2.0).sample(0.25).unwrap() - 30.0).abs() < 1e-12);
        assert!(gpa(1.0, 1.0).sample(0.0).is_err());
        assert!(gpa(1.0, 1.0).sample(1.0).is_err());
    }

    #[test]
    fn means() {
        assert_eq!(gpa(0.65, 0.7).mean(), Mean::Infinite);
        assert_eq!(gpa(1.0, 0.7).mean(), Mean::Infinite);
        assert_eq!(gpa(2.0, 3.0).mean(), Mean::Finite(3.0));
        assert_eq!(ExpParams::new(0.5).unwrap().mean(), Mean::Finite(2.0));
    }

    #[test]
    fn exponential_values() {
        let one = ExpParams::new(1.0).unwrap();
        assert_eq!(exp_survival(&one, 0.0).unwrap(), 1.0);
        let dacite = ExpParams::new(0.3390).unwrap();
        let median = exp_quantile(&dacite, 0.5).unwrap();
        assert!((median - 2.044_681_948_554_411).abs() < 1e-12, "{median}");
        assert!(exp_survival(&one, -1.0).is_err());
        assert!(exp_quantile(&one, 1.0).is_err());
    }

    #[test]
    fn exponential_is_the_large_shape_limit() {
        let lambda = 0.34;
        let limit = gpa(1e6, 1e6 / lambda);
        let e = ExpParams::new(lambda).unwrap();
        assert!((limit.survival(1.0).unwrap() - e.survival(1.0).unwrap()).abs() < 1e-5);
    }

    #[test]
    fn extreme_tail_stays_finite() {
        let p = gpa(0.05, 0.01);
        let s = p.survival(1e4).unwrap();
        assert!(s > 0.0 && s < 1.0);
        assert!((p.log_survival(1e4).unwrap() + 0.05 * (1e6_f64).ln_1p()).abs() < 1e-12);
    }
}
