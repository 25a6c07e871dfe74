use std::path::PathBuf;

use clap::Args;
use domecast::gof::{gof_test, DEFAULT_BINS};
use domecast::pareto::DurationModel;
use domecast::{ModelKind, Result};
use serde_json::json;

use super::{usage, OutArgs};
use crate::commands::fit::load_fit;
use crate::output::{read_catalog, write_json};

#[derive(Debug, Args)]
pub struct GofArgs {
    /// Catalog CSV the model was fitted to.
    catalog: PathBuf,
    /// fit.json from the `fit` command.
    #[arg(long)]
    fit: PathBuf,
    /// Number of equiprobable bins.
    #[arg(long, default_value_t = DEFAULT_BINS)]
    bins: usize,
    /// Catalog durations are in days (divided by 365.25).
    #[arg(long)]
    days: bool,
    #[command(flatten)]
    out: OutArgs,
}

pub fn run(args: GofArgs) -> Result<()> {
    let fit = load_fit(&args.fit)?;
    let mut catalog = read_catalog(&args.catalog, args.days)?;
    if let Some(class) = fit.class {
        catalog = catalog.for_class(class)?;
    }
    let durations: Vec<f64> = catalog.records().iter().filter(|r| !r.censored).map(|r| r.duration).collect();
    let model: Box<dyn DurationModel> = match fit.model_kind {
        ModelKind::Aggregate | ModelKind::GroupedClass => Box::new(fit.gpa_params()?),
        ModelKind::Exponential => Box::new(fit.exp_params()?),
        ModelKind::Regression => return Err(usage("goodness of fit is defined for single-law fits, not the regression")),
    };
    let report = gof_test(&durations, model.as_ref(), fit.k, args.bins)?;
    let doc = json!({
        "schema": domecast::SCHEMA,
        "model": fit.model_kind,
        "class": fit.class,
        "statistic": report.statistic,
        "dof": report.dof,
        "p_value": report.p_value,
        "report": report,
    });
    write_json(&args.out.out, "gof.json", &doc)?;
    Ok(())
}
