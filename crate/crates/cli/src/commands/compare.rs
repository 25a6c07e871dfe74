use std::path::PathBuf;

use clap::Args;
use domecast::fit::{compare_models, fit_aggregate, fit_exponential, fit_regression, Family, ModelScore};
use domecast::Result;
use serde_json::json;

use super::OutArgs;
use crate::commands::fit::grouped_fits;
use crate::output::{read_catalog, write_json};

#[derive(Debug, Args)]
pub struct CompareArgs {
    /// Catalog CSV.
    catalog: PathBuf,
    /// Catalog durations are in days (divided by 365.25).
    #[arg(long)]
    days: bool,
    #[command(flatten)]
    out: OutArgs,
}

pub fn run(args: CompareArgs) -> Result<()> {
    let catalog = read_catalog(&args.catalog, args.days)?;
    let mut scores = vec![
        ModelScore::from_fits("exponential", &[fit_exponential(&catalog)?])?,
        ModelScore::from_fits("aggregate", &[fit_aggregate(&catalog)?])?,
    ];
    let mut skipped = Vec::new();
    match grouped_fits(&catalog, Family::GPa) {
        Ok(fits) => scores.push(ModelScore::from_fits("grouped", &fits)?),
        Err(e) => skipped.push(json!({"model": "grouped", "reason": e.to_string()})),
    }
    match fit_regression(&catalog) {
        Ok(fit) => scores.push(ModelScore::from_fits("regression", &[fit])?),
        Err(e) => skipped.push(json!({"model": "regression", "reason": e.to_string()})),
    }
    let comparison = compare_models(scores)?;
    let doc = json!({
        "schema": domecast::SCHEMA,
        "n": catalog.len(),
        "best_aic": comparison.best_aic,
        "best_bic": comparison.best_bic,
        "models": comparison.models,
        "skipped": skipped,
    });
    write_json(&args.out.out, "compare.json", &doc)?;
    Ok(())
}
