use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use domecast::bayes::{read_chain_csv, PosteriorChain};
use domecast::catalog::DAYS_PER_YEAR;
use domecast::forecast::{
    forecast_batch, plugin_quartiles, predictive_curve, predictive_quartiles_with, ForecastTarget, QuartileMethod,
    Quartiles,
};
use domecast::{CompositionClass, Error, FitResult, GPaParams, ModelKind, Result};
use serde_json::{json, Value};

use super::{usage, OutArgs};
use crate::commands::fit::load_fit;
use crate::output::{csv_bytes, read_text, write_atomic, write_json};

#[derive(Debug, Args)]
pub struct ForecastArgs {
    /// chain.csv from `posterior` (Bayesian forecast).
    #[arg(long, required_unless_present = "fit", conflicts_with = "fit")]
    chain: Option<PathBuf>,
    /// fit.json from `fit` (plug-in forecast).
    #[arg(long)]
    fit: Option<PathBuf>,
    /// Age of the ongoing eruption, in years (days with --days).
    #[arg(long, required_unless_present = "targets")]
    age: Option<f64>,
    /// Silica percentage; required for regression models.
    #[arg(long)]
    silica: Option<f64>,
    /// Remaining-time grid in years: START:END:COUNT or a comma list.
    #[arg(long, default_value = "0:50:101")]
    grid: String,
    /// Also write remaining-duration quartiles to quartiles.json.
    #[arg(long)]
    quartiles: bool,
    #[arg(long, value_enum, default_value = "predictive-mean")]
    quartile_method: MethodArg,
    /// Ages (--age and the targets file) are in days (divided by 365.25).
    #[arg(long)]
    days: bool,
    /// CSV of eruptions to forecast together, columns name,age,silica,class.
    #[arg(long, conflicts_with = "age")]
    targets: Option<PathBuf>,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    /// Invert the posterior-mean exceedance curve.
    PredictiveMean,
    /// Average the per-draw quantiles.
    DrawAverage,
}

impl From<MethodArg> for QuartileMethod {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::PredictiveMean => QuartileMethod::PredictiveMean,
            MethodArg::DrawAverage => QuartileMethod::DrawAverage,
        }
    }
}

fn parse_number(s: &str) -> Result<f64> {
    s.trim().parse().map_err(|_| usage(format!("not a number: {s:?}")))
}

pub fn parse_grid(spec: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    match parts.as_slice() {
        [start, end, count] => {
            let (a, b) = (parse_number(start)?, parse_number(end)?);
            let n: usize = count.trim().parse().map_err(|_| usage(format!("bad grid count {count:?}")))?;
            match n {
                0 => Err(usage("grid needs at least one point")),
                1 => Ok(vec![a]),
                _ => Ok((0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()),
            }
        }
        [_] => spec.split(',').map(parse_number).collect(),
        _ => Err(usage(format!("grid must be START:END:COUNT or a comma list, got {spec:?}"))),
    }
}

/// A fitted model as a one-draw chain, so plug-in and Bayesian forecasts
/// share one code path.
fn chain_from_fit(fit: &FitResult) -> Result<PosteriorChain> {
    let draw: Vec<f64> = match fit.model_kind {
        ModelKind::Exponential => return Err(usage("forecasts need a generalized Pareto or regression fit")),
        kind => kind
            .parameter_names()
            .iter()
            .map(|n| fit.estimate(n).ok_or_else(|| usage(format!("fit has no {n} estimate"))))
            .collect::<Result<_>>()?,
    };
    PosteriorChain::from_draws(fit.model_kind, vec![draw])
}

fn plugin_law(fit: &FitResult, silica: Option<f64>) -> Result<GPaParams> {
    match fit.model_kind {
        ModelKind::Regression => {
            let x = silica.ok_or_else(|| usage("silica is required for a regression fit"))?;
            fit.regression_params()?.for_silica(x)
        }
        _ => fit.gpa_params(),
    }
}

fn read_targets(path: &Path, days: bool) -> Result<Vec<ForecastTarget>> {
    let text = read_text(path)?;
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).comment(Some(b'#')).from_reader(text.as_bytes());
    let mut targets = Vec::new();
    for row in reader.records() {
        let row = row?;
        let line = row.position().map(|p| p.line()).unwrap_or(0);
        let bad = |message: String| Error::Parse { line, message };
        let field = |i: usize| row.get(i).unwrap_or("").to_string();
        let age: f64 = field(1).parse().map_err(|_| bad(format!("bad age {:?}", field(1))))?;
        let silica = match field(2).as_str() {
            "" => None,
            s => Some(s.parse().map_err(|_| bad(format!("bad silica {s:?}")))?),
        };
        let class = match field(3).as_str() {
            "" => None,
            s => Some(s.parse::<CompositionClass>().map_err(|_| bad(format!("bad class {s:?}")))?),
        };
        targets.push(ForecastTarget {
            name: field(0),
            s: if days { age / DAYS_PER_YEAR } else { age },
            silica_pct: silica,
            class,
        });
    }
    if targets.is_empty() {
        return Err(Error::InsufficientData(format!("{} lists no eruptions", path.display())));
    }
    Ok(targets)
}

fn quartiles_json(q: &Quartiles) -> Value {
    json!({"q25": q.q25, "q50": q.q50, "q75": q.q75})
}

pub fn run(args: ForecastArgs) -> Result<()> {
    let (chain, fit, mode) = match (&args.chain, &args.fit) {
        (Some(path), _) => (read_chain_csv(&read_text(path)?)?, None, "posterior"),
        (None, Some(path)) => {
            let fit = load_fit(path)?;
            (chain_from_fit(&fit)?, Some(fit), "plug_in")
        }
        (None, None) => return Err(usage("give --chain or --fit")),
    };
    let grid = parse_grid(&args.grid)?;
    let out = &args.out.out;

    if let Some(path) = &args.targets {
        let targets = read_targets(path, args.days)?;
        let results = forecast_batch(&chain, &targets, &grid)?;
        let csv = csv_bytes(|w| {
            w.write_record(["name", "class", "s", "t", "mean", "low", "high", "plug_in"])?;
            for r in &results {
                let class = r.target.class.map(|c| c.as_str()).unwrap_or("");
                for i in 0..grid.len() {
                    let c = &r.curve;
                    w.write_record([
                        r.target.name.clone(),
                        class.to_string(),
                        r.target.s.to_string(),
                        c.t_grid[i].to_string(),
                        c.mean_probability[i].to_string(),
                        c.band_low[i].to_string(),
                        c.band_high[i].to_string(),
                        c.plug_in_probability[i].to_string(),
                    ])?;
                }
            }
            Ok(())
        })?;
        let doc = json!({
            "schema": domecast::SCHEMA,
            "mode": mode,
            "model": chain.model_kind,
            "band_level": domecast::forecast::BAND_LEVEL,
            "targets": results.iter().map(|r| json!({
                "name": r.target.name,
                "class": r.target.class,
                "s": r.target.s,
                "silica_pct": r.target.silica_pct,
                "quartiles": quartiles_json(&r.quartiles),
            })).collect::<Vec<_>>(),
        });
        write_atomic(out, "forecast_batch.csv", &csv)?;
        write_json(out, "forecast_batch.json", &doc)?;
        return Ok(());
    }

    let age = args.age.ok_or_else(|| usage("give --age or --targets"))?;
    let s = if args.days { age / DAYS_PER_YEAR } else { age };
    let curve = predictive_curve(&chain, s, args.silica, &grid)?;
    let quartiles = if args.quartiles {
        Some(match &fit {
            Some(fit) => plugin_quartiles(&plugin_law(fit, args.silica)?, s)?,
            None => predictive_quartiles_with(&chain, s, args.silica, args.quartile_method.into())?,
        })
    } else {
        None
    };

    let mut csv = Vec::new();
    curve.write_csv(&mut csv)?;
    let mut header = serde_json::to_value(curve.header(chain.len()))?;
    if let Value::Object(map) = &mut header {
        map.insert("mode".into(), json!(mode));
        map.insert("quartiles".into(), json!(quartiles.as_ref().map(quartiles_json)));
    }
    write_atomic(out, "forecast.csv", &csv)?;
    write_json(out, "forecast.json", &header)?;
    if fit.is_none() {
        let mut draws = Vec::new();
        curve.write_draws_csv(&mut draws)?;
        write_atomic(out, "draws.csv", &draws)?;
    }
    if let Some(q) = quartiles {
        let method = if fit.is_some() { "closed_form" } else {
            match args.quartile_method {
                MethodArg::PredictiveMean => "predictive_mean",
                MethodArg::DrawAverage => "draw_average",
            }
        };
        let doc = json!({
            "schema": domecast::SCHEMA,
            "mode": mode,
            "model": chain.model_kind,
            "s": s,
            "silica_pct": args.silica,
            "method": method,
            "q25": q.q25,
            "q50": q.q50,
            "q75": q.q75,
        });
        write_json(out, "quartiles.json", &doc)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_specs() {
        assert_eq!(parse_grid("0:10:3").unwrap(), vec![0.0, 5.0, 10.0]);
        assert_eq!(parse_grid("0:10:1").unwrap(), vec![0.0]);
        assert_eq!(parse_grid("1, 2,4").unwrap(), vec![1.0, 2.0, 4.0]);
        assert!(parse_grid("0:10").is_err());
        assert!(parse_grid("0:10:0").is_err());
        assert!(parse_grid("a,b").is_err());
    }
}
