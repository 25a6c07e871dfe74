//! Remaining-duration forecasts for ongoing eruptions.
//!
//! Plug-in forecasts evaluate the conditional law `GPa(α, β + s)` at point
//! estimates. Posterior-predictive forecasts average the conditional
//! exceedance over chain draws and report a 90% band across draws.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bayes::PosteriorChain;
use crate::catalog::CompositionClass;
use crate::error::{Error, Result};
use crate::fit::ModelKind;
use crate::likelihood::RegressionParams;
use crate::numeric::{mean, quantile_sorted, sorted};
use crate::pareto::GPaParams;

pub const BAND_LEVEL: f64 = 0.90;
/// Upper end of the bisection bracket for predictive quartiles, in years.
pub const QUARTILE_BRACKET_YR: f64 = 1e4;
pub const QUARTILE_REL_TOL: f64 = 1e-6;
/// Number of per-draw curves kept for plotting.
pub const RETAINED_DRAW_CURVES: usize = 100;

/// `Δ_q = (β + s)[(1 − q)^(−1/α) − 1]`, the `q` quantile of the remaining
/// duration of an eruption already `s` years old.
pub fn plugin_remaining_quantile(p: &GPaParams, s: f64, q: f64) -> Result<f64> {
    p.condition_on_age(s)?.quantile(q)
}

/// Median remaining duration `(β + s)(2^(1/α) − 1)`.
pub fn plugin_median_shift(p: &GPaParams, s: f64) -> Result<f64> {
    plugin_remaining_quantile(p, s, 0.5)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Exceedance {
    pub mean: f64,
    pub low: f64,
    pub high: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quartiles {
    pub q25: f64,
    pub q50: f64,
    pub q75: f64,
}

/// How posterior quartiles of the remaining duration are formed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QuartileMethod {
    /// Invert the posterior-mean exceedance curve.
    #[default]
    PredictiveMean,
    /// Average the closed-form quantiles of the individual draws.
    DrawAverage,
}

fn check_age(s: f64) -> Result<()> {
    if s >= 0.0 && s.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid("s", s, "age must be non-negative and finite"))
    }
}

fn check_t(t: f64) -> Result<()> {
    if t >= 0.0 && !t.is_nan() {
        Ok(())
    } else {
        Err(Error::invalid("t", t, "must be non-negative"))
    }
}

/// Per-draw conditional laws `GPa(α′, β′ + s)` with silica adjustment for
/// regression chains. Silica is ignored for chains without covariates.
fn conditional_draws(chain: &PosteriorChain, s: f64, silica: Option<f64>) -> Result<Vec<GPaParams>> {
    check_age(s)?;
    let law = |d: &[f64]| -> Result<GPaParams> {
        match chain.model_kind {
            ModelKind::Regression => {
                let x = silica.ok_or_else(|| Error::Usage("silica is required for a regression chain".into()))?;
                if !x.is_finite() {
                    return Err(Error::invalid("silica", x, "must be finite"));
                }
                RegressionParams::new(d[0], d[1], d[2], d[3])?.for_silica(x)
            }
            _ => GPaParams::new(d[0], d[1]),
        }
    };
    chain.draws.iter().map(|d| law(d)?.condition_on_age(s)).collect()
}

fn exceedance_of(laws: &[GPaParams], t: f64) -> Exceedance {
    let p: Vec<f64> = laws.iter().map(|g| g.survival(t).unwrap_or(0.0)).collect();
    summarize_probabilities(&p)
}

fn summarize_probabilities(p: &[f64]) -> Exceedance {
    let s = sorted(p.iter().copied());
    let tail = (1.0 - BAND_LEVEL) / 2.0;
    let m = mean(p).clamp(s[0], s[s.len() - 1]);
    Exceedance {
        mean: m,
        low: quantile_sorted(&s, tail),
        high: quantile_sorted(&s, 1.0 - tail),
    }
}

fn mean_exceedance(laws: &[GPaParams], t: f64) -> f64 {
    mean(&laws.iter().map(|g| g.survival(t).unwrap_or(0.0)).collect::<Vec<_>>())
}

/// Posterior-predictive probability that an eruption `s` years old lasts at
/// least `t` more years, with the 5% and 95% draw quantiles.
pub fn predictive_exceedance(chain: &PosteriorChain, s: f64, silica: Option<f64>, t: f64) -> Result<Exceedance> {
    check_t(t)?;
    let laws = conditional_draws(chain, s, silica)?;
    Ok(exceedance_of(&laws, t))
}

/// Posterior-mean parameters, mapped to the silica of interest.
fn posterior_mean_law(chain: &PosteriorChain, silica: Option<f64>) -> Result<GPaParams> {
    let m: Vec<f64> = (0..chain.draws[0].len()).map(|i| mean(&chain.column(i))).collect();
    match chain.model_kind {
        ModelKind::Regression => {
            let x = silica.ok_or_else(|| Error::Usage("silica is required for a regression chain".into()))?;
            RegressionParams::new(m[0], m[1], m[2], m[3])?.for_silica(x)
        }
        _ => GPaParams::new(m[0], m[1]),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForecastCurve {
    pub t_grid: Vec<f64>,
    pub mean_probability: Vec<f64>,
    pub band_low: Vec<f64>,
    pub band_high: Vec<f64>,
    pub band_level: f64,
    pub plug_in_probability: Vec<f64>,
    pub eruption_age_s: f64,
    pub silica_pct: Option<f64>,
    pub model_kind: ModelKind,
    /// Exceedance curves of the first draws, one inner vector per draw.
    #[serde(skip)]
    pub draw_curves: Vec<Vec<f64>>,
}

/// Metadata written next to a forecast curve CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForecastHeader {
    pub schema: String,
    pub model: ModelKind,
    pub s: f64,
    pub silica_pct: Option<f64>,
    pub band_level: f64,
    pub draws: usize,
    pub points: usize,
}

impl ForecastCurve {
    pub fn header(&self, draws: usize) -> ForecastHeader {
        ForecastHeader {
            schema: crate::SCHEMA.to_string(),
            model: self.model_kind,
            s: self.eruption_age_s,
            silica_pct: self.silica_pct,
            band_level: self.band_level,
            draws,
            points: self.t_grid.len(),
        }
    }

    /// Columns `t,mean,low,high,plug_in`.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["t", "mean", "low", "high", "plug_in"])?;
        for i in 0..self.t_grid.len() {
            w.write_record(
                [
                    self.t_grid[i],
                    self.mean_probability[i],
                    self.band_low[i],
                    self.band_high[i],
                    self.plug_in_probability[i],
                ]
                .iter()
                .map(f64::to_string),
            )?;
        }
        w.flush()?;
        Ok(())
    }

    /// Retained per-draw curves as columns `t,draw_1,…,draw_k`.
    pub fn write_draws_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let mut header = vec!["t".to_string()];
        header.extend((1..=self.draw_curves.len()).map(|j| format!("draw_{j}")));
        w.write_record(&header)?;
        for (i, t) in self.t_grid.iter().enumerate() {
            let mut row = vec![t.to_string()];
            row.extend(self.draw_curves.iter().map(|c| c[i].to_string()));
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Exceedance curve with 90% band over a sorted grid of remaining times.
pub fn predictive_curve(chain: &PosteriorChain, s: f64, silica: Option<f64>, t_grid: &[f64]) -> Result<ForecastCurve> {
    if t_grid.is_empty() {
        return Err(Error::Usage("forecast grid is empty".into()));
    }
    for &t in t_grid {
        check_t(t)?;
    }
    if t_grid.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::Usage("forecast grid must be sorted ascending".into()));
    }
    let laws = conditional_draws(chain, s, silica)?;
    let plug = posterior_mean_law(chain, silica)?.condition_on_age(s)?;
    let n = t_grid.len();
    let mut curve = ForecastCurve {
        t_grid: t_grid.to_vec(),
        mean_probability: Vec::with_capacity(n),
        band_low: Vec::with_capacity(n),
        band_high: Vec::with_capacity(n),
        band_level: BAND_LEVEL,
        plug_in_probability: Vec::with_capacity(n),
        eruption_age_s: s,
        silica_pct: if chain.model_kind == ModelKind::Regression { silica } else { None },
        model_kind: chain.model_kind,
        draw_curves: laws
            .iter()
            .take(RETAINED_DRAW_CURVES)
            .map(|g| t_grid.iter().map(|&t| g.survival(t).unwrap_or(0.0)).collect())
            .collect(),
    };
    for &t in t_grid {
        let e = exceedance_of(&laws, t);
        curve.mean_probability.push(e.mean);
        curve.band_low.push(e.low);
        curve.band_high.push(e.high);
        curve.plug_in_probability.push(plug.survival(t)?);
    }
    // Averages of non-increasing curves are non-increasing; clear rounding noise.
    for v in [&mut curve.mean_probability, &mut curve.plug_in_probability] {
        for i in 1..v.len() {
            v[i] = v[i].min(v[i - 1]);
        }
    }
    Ok(curve)
}

/// Solves `mean_exceedance(t) = target` by bisection on `[0, 10⁴]` years.
fn invert_mean_exceedance(laws: &[GPaParams], target: f64) -> Result<f64> {
    let (mut lo, mut hi) = (0.0_f64, QUARTILE_BRACKET_YR);
    let at_hi = mean_exceedance(laws, hi);
    if at_hi > target {
        return Err(Error::Bracket(format!(
            "predictive exceedance at {QUARTILE_BRACKET_YR} yr is {at_hi:.4}, above {target}"
        )));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mean_exceedance(laws, mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= QUARTILE_REL_TOL * hi || hi <= f64::MIN_POSITIVE {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Posterior quartiles of the remaining duration via the predictive mean.
pub fn predictive_quartiles(chain: &PosteriorChain, s: f64, silica: Option<f64>) -> Result<Quartiles> {
    predictive_quartiles_with(chain, s, silica, QuartileMethod::PredictiveMean)
}

pub fn predictive_quartiles_with(
    chain: &PosteriorChain,
    s: f64,
    silica: Option<f64>,
    method: QuartileMethod,
) -> Result<Quartiles> {
    let laws = conditional_draws(chain, s, silica)?;
    let at = |q: f64| -> Result<f64> {
        match method {
            QuartileMethod::PredictiveMean => invert_mean_exceedance(&laws, 1.0 - q),
            QuartileMethod::DrawAverage => {
                let v = laws.iter().map(|g| g.quantile(q)).collect::<Result<Vec<f64>>>()?;
                Ok(mean(&v))
            }
        }
    };
    Ok(Quartiles {
        q25: at(0.25)?,
        q50: at(0.5)?,
        q75: at(0.75)?,
    })
}

/// Plug-in quartiles of the remaining duration.
pub fn plugin_quartiles(p: &GPaParams, s: f64) -> Result<Quartiles> {
    Ok(Quartiles {
        q25: plugin_remaining_quantile(p, s, 0.25)?,
        q50: plugin_remaining_quantile(p, s, 0.5)?,
        q75: plugin_remaining_quantile(p, s, 0.75)?,
    })
}

/// One ongoing eruption to forecast.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForecastTarget {
    pub name: String,
    pub s: f64,
    pub silica_pct: Option<f64>,
    pub class: Option<CompositionClass>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TargetForecast {
    pub target: ForecastTarget,
    pub curve: ForecastCurve,
    pub quartiles: Quartiles,
}

/// Forecasts for several eruptions, evaluated in parallel, in input order.
pub fn forecast_batch(chain: &PosteriorChain, targets: &[ForecastTarget], t_grid: &[f64]) -> Result<Vec<TargetForecast>> {
    targets
        .par_iter()
        .map(|target| {
            Ok(TargetForecast {
                curve: predictive_curve(chain, target.s, target.silica_pct, t_grid)?,
                quartiles: predictive_quartiles(chain, target.s, target.silica_pct)?,
                target: target.clone(),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn shv_age() -> f64 {
        7189.0 / 365.25
    }

    fn aggregate() -> GPaParams {
        GPaParams::new(0.6487, 0.7018).unwrap()
    }

    fn constant_chain(alpha: f64, beta: f64, n: usize) -> PosteriorChain {
        PosteriorChain::from_draws(ModelKind::Aggregate, vec![vec![alpha, beta]; n]).unwrap()
    }

    #[test]
    fn plugin_matches_closed_form() {
        let p = aggregate();
        for &(s, q) in &[(0.0, 0.1), (1.49, 0.25), (19.68, 0.5), (100.0, 0.99)] {
            let direct = (0.7018 + s) * ((1.0_f64 - q).powf(-1.0 / 0.6487) - 1.0);
            let got = plugin_remaining_quantile(&p, s, q).unwrap();
            assert!((got / direct - 1.0).abs() < 1e-13, "{s} {q}");
            assert_eq!(got, p.condition_on_age(s).unwrap().quantile(q).unwrap());
        }
        assert_eq!(plugin_remaining_quantile(&p, 3.0, 0.0).unwrap(), 0.0);
        assert!(plugin_remaining_quantile(&p, 3.0, 1.0).is_err());
        assert!(plugin_remaining_quantile(&p, -1.0, 0.5).is_err());
    }

    #[test]
    fn plugin_shv_and_sinabung_quartiles() {
        let p = aggregate();
        let shv = plugin_quartiles(&p, shv_age()).unwrap();
        for (got, want) in [(shv.q25, 11.36), (shv.q50, 38.91), (shv.q75, 152.18)] {
            assert!((got / want - 1.0).abs() < 0.01, "{got} vs {want}");
        }
        let sin = plugin_quartiles(&p, 546.0 / 365.25).unwrap();
        for (got, want) in [(sin.q25, 1.23), (sin.q50, 4.20), (sin.q75, 16.42)] {
            assert!((got / want - 1.0).abs() < 0.01, "{got} vs {want}");
        }
    }

    #[test]
    fn median_shift_is_affine_in_age() {
        let unit = GPaParams::new(1.0, 1.0).unwrap();
        assert_eq!(plugin_median_shift(&unit, 0.0).unwrap(), 1.0);
        let p = aggregate();
        let slope = 2.0_f64.powf(1.0 / 0.6487) - 1.0;
        let d0 = plugin_median_shift(&p, 0.0).unwrap();
        for s in [0.5, 2.0, 19.68, 80.0] {
            let d = plugin_median_shift(&p, s).unwrap();
            assert!((d - d0 - slope * s).abs() < 1e-10 * d);
            assert_eq!(d, plugin_remaining_quantile(&p, s, 0.5).unwrap());
        }
    }

    #[test]
    fn constant_chain_is_degenerate() {
        let chain = constant_chain(0.6487, 0.7018, 50);
        let e = predictive_exceedance(&chain, 1.49, None, 10.0).unwrap();
        let truth = aggregate().condition_on_age(1.49).unwrap().survival(10.0).unwrap();
        assert!((e.mean - truth).abs() < 1e-15);
        assert_eq!((e.low, e.high), (truth, truth));
        let z = predictive_exceedance(&chain, 1.49, None, 0.0).unwrap();
        assert_eq!((z.mean, z.low, z.high), (1.0, 1.0, 1.0));

        let q = predictive_quartiles(&chain, shv_age(), None).unwrap();
        let plug = plugin_quartiles(&aggregate(), shv_age()).unwrap();
        for (a, b) in [(q.q25, plug.q25), (q.q50, plug.q50), (q.q75, plug.q75)] {
            assert!((a / b - 1.0).abs() < 2e-6, "{a} vs {b}");
        }
        let avg = predictive_quartiles_with(&chain, shv_age(), None, QuartileMethod::DrawAverage).unwrap();
        assert!((avg.q50 / plug.q50 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn curve_properties() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let draws = (0..300)
            .map(|_| vec![rng.random_range(0.3..1.5), rng.random_range(0.2..3.0)])
            .collect();
        let chain = PosteriorChain::from_draws(ModelKind::Aggregate, draws).unwrap();
        let grid: Vec<f64> = (0..=60).map(|i| i as f64 * 0.5).collect();
        let c = predictive_curve(&chain, 2.0, None, &grid).unwrap();
        assert_eq!(c.draw_curves.len(), RETAINED_DRAW_CURVES);
        assert_eq!(c.mean_probability[0], 1.0);
        for i in 0..grid.len() {
            assert!(c.band_low[i] <= c.mean_probability[i] && c.mean_probability[i] <= c.band_high[i]);
            assert!((0.0..=1.0).contains(&c.plug_in_probability[i]));
            if i > 0 {
                assert!(c.mean_probability[i] <= c.mean_probability[i - 1]);
                assert!(c.plug_in_probability[i] <= c.plug_in_probability[i - 1]);
            }
        }
        assert!(predictive_curve(&chain, 2.0, None, &[1.0, 0.5]).is_err());
        let one = predictive_curve(&chain, 2.0, None, &[0.0]).unwrap();
        assert_eq!(
            (one.mean_probability[0], one.band_low[0], one.band_high[0], one.plug_in_probability[0]),
            (1.0, 1.0, 1.0, 1.0)
        );
    }

    #[test]
    fn constant_chain_curve_equals_plugin() {
        let chain = constant_chain(1.2, 0.4, 20);
        let grid = [0.0, 0.3, 1.0, 5.0, 40.0];
        let c = predictive_curve(&chain, 3.0, None, &grid).unwrap();
        for i in 0..grid.len() {
            assert!((c.mean_probability[i] - c.plug_in_probability[i]).abs() < 1e-15);
        }
    }

    #[test]
    fn median_inverts_the_exceedance() {
        let draws = vec![vec![0.5, 0.3], vec![1.4, 2.0], vec![0.9, 0.9]];
        let chain = PosteriorChain::from_draws(ModelKind::Aggregate, draws).unwrap();
        let q = predictive_quartiles(&chain, 4.0, None).unwrap();
        let e = predictive_exceedance(&chain, 4.0, None, q.q50).unwrap();
        assert!((e.mean - 0.5).abs() < 1e-5);
        assert!(q.q25 < q.q50 && q.q50 < q.q75);
    }

    #[test]
    fn regression_chain_needs_silica() {
        let chain = PosteriorChain::from_draws(ModelKind::Regression, vec![vec![0.6, 0.7, 0.04, 0.13]; 10]).unwrap();
        let err = predictive_exceedance(&chain, 1.0, None, 10.0).unwrap_err();
        assert_eq!(err.kind(), crate::ErrorKind::Usage);
        let at_center = predictive_exceedance(&chain, 1.0, Some(60.0), 10.0).unwrap();
        let plain = constant_chain(0.6, 0.7, 10);
        assert_eq!(at_center, predictive_exceedance(&plain, 1.0, None, 10.0).unwrap());
    }

    #[test]
    fn bracket_failure_is_reported() {
        let chain = constant_chain(0.05, 10.0, 5);
        assert!(matches!(predictive_quartiles(&chain, 1.0, None), Err(Error::Bracket(_))));
    }

    #[test]
    fn csv_output_layout() {
        let chain = constant_chain(1.0, 1.0, 3);
        let c = predictive_curve(&chain, 0.0, None, &[0.0, 1.0]).unwrap();
        let mut buf = Vec::new();
        c.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "t,mean,low,high,plug_in\n0,1,1,1,1\n1,0.5,0.5,0.5,0.5\n");
        let mut buf = Vec::new();
        c.write_draws_csv(&mut buf).unwrap();
        assert!(String::from_utf8(buf).unwrap().starts_with("t,draw_1,draw_2,draw_3\n"));
        assert_eq!(c.header(3).band_level, 0.9);
    }

    #[test]
    fn batch_preserves_order() {
        let chain = constant_chain(0.6487, 0.7018, 10);
        let targets: Vec<ForecastTarget> = [("A", 1.49), ("B", 19.68), ("C", 0.1)]
            .iter()
            .map(|&(n, s)| ForecastTarget {
                name: n.into(),
                s,
                silica_pct: None,
                class: Some(CompositionClass::Evolved),
            })
            .collect();
        let out = forecast_batch(&chain, &targets, &[0.0, 10.0]).unwrap();
        assert_eq!(out.iter().map(|f| f.target.name.as_str()).collect::<Vec<_>>(), ["A", "B", "C"]);
        assert!((out[1].quartiles.q50 / 38.91 - 1.0).abs() < 0.005);
    }
}
