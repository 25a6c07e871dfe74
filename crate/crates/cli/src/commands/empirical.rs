use std::path::PathBuf;

use clap::Args;
use domecast::fit::{fit_aggregate, fit_grouped, Family};
use domecast::forecast::plugin_median_shift;
use domecast::{Catalog, CompositionClass, GPaParams, Result};

use super::OutArgs;
use crate::output::{csv_bytes, read_catalog, write_atomic};

/// Points on the logarithmic duration grid of the model curves.
const CURVE_POINTS: usize = 121;
const CURVE_RANGE_YR: (f64, f64) = (1e-3, 1e3);

#[derive(Debug, Args)]
pub struct EmpiricalArgs {
    /// Catalog CSV.
    catalog: PathBuf,
    /// Catalog durations are in days (divided by 365.25).
    #[arg(long)]
    days: bool,
    #[command(flatten)]
    out: OutArgs,
}

/// The whole catalog followed by each class present, with its generalized
/// Pareto fit when one exists.
fn groups(catalog: &Catalog) -> Result<Vec<(String, Catalog, Option<GPaParams>)>> {
    let mut out = vec![("all".to_string(), catalog.clone(), Some(fit_aggregate(catalog)?.gpa_params()?))];
    for class in CompositionClass::ALL {
        let Ok(sub) = catalog.for_class(class) else { continue };
        let law = fit_grouped(catalog, class, Family::GPa).and_then(|f| f.gpa_params()).ok();
        out.push((class.as_str().to_string(), sub, law));
    }
    Ok(out)
}

pub fn run(args: EmpiricalArgs) -> Result<()> {
    let catalog = read_catalog(&args.catalog, args.days)?;
    let groups = groups(&catalog)?;

    let empirical = csv_bytes(|w| {
        w.write_record(["group", "volcano", "duration", "censored", "exceedance"])?;
        for (name, sub, _) in &groups {
            let mut records: Vec<_> = sub.records().iter().collect();
            records.sort_by(|a, b| a.duration.total_cmp(&b.duration));
            let n = records.len() as f64;
            for (i, r) in records.iter().enumerate() {
                w.write_record([
                    name.clone(),
                    r.volcano_name.clone(),
                    r.duration.to_string(),
                    r.censored.to_string(),
                    ((n - i as f64) / n).to_string(),
                ])?;
            }
        }
        Ok(())
    })?;

    let (lo, hi) = (CURVE_RANGE_YR.0.ln(), CURVE_RANGE_YR.1.ln());
    let grid: Vec<f64> = (0..CURVE_POINTS)
        .map(|i| (lo + (hi - lo) * i as f64 / (CURVE_POINTS - 1) as f64).exp())
        .collect();
    let curves = csv_bytes(|w| {
        w.write_record(["group", "alpha", "beta", "t", "survival"])?;
        for (name, _, law) in &groups {
            let Some(law) = law else { continue };
            for &t in &grid {
                w.write_record([
                    name.clone(),
                    law.alpha().to_string(),
                    law.beta().to_string(),
                    t.to_string(),
                    law.survival(t)?.to_string(),
                ])?;
            }
        }
        Ok(())
    })?;

    let shifts = csv_bytes(|w| {
        w.write_record(["volcano", "class", "model", "s", "delta", "projected"])?;
        for r in catalog.records().iter().filter(|r| r.censored) {
            for (name, _, law) in &groups {
                let Some(law) = law else { continue };
                if name != "all" && name != r.composition_class.as_str() {
                    continue;
                }
                let model = if name == "all" { "aggregate" } else { "grouped" };
                let delta = plugin_median_shift(law, r.duration)?;
                w.write_record([
                    r.volcano_name.clone(),
                    r.composition_class.as_str().to_string(),
                    model.to_string(),
                    r.duration.to_string(),
                    delta.to_string(),
                    (r.duration + delta).to_string(),
                ])?;
            }
        }
        Ok(())
    })?;

    let out = &args.out.out;
    write_atomic(out, "empirical.csv", &empirical)?;
    write_atomic(out, "model_curves.csv", &curves)?;
    write_atomic(out, "median_shift.csv", &shifts)?;
    Ok(())
}
