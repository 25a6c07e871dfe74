use std::path::PathBuf;

use clap::Args;
use domecast::bayes::{
    chain_summary, run_mh, write_chain_csv, McmcConfig, PriorSpec, DEFAULT_BURN_IN, DEFAULT_ITERATIONS, DEFAULT_THIN,
    MIN_SUMMARY_DRAWS,
};
use domecast::{ModelKind, Result};
use serde_json::{json, Value};

use super::{usage, ClassArg, ModelArg, OutArgs};
use crate::output::{read_catalog, write_atomic, write_json};

#[derive(Debug, Args)]
pub struct PosteriorArgs {
    /// Catalog CSV.
    catalog: PathBuf,
    #[arg(long, value_enum, default_value = "aggregate")]
    model: ModelArg,
    /// Composition class, required for the grouped model.
    #[arg(long, value_enum)]
    class: Option<ClassArg>,
    #[arg(long, default_value_t = DEFAULT_BURN_IN)]
    burn_in: usize,
    /// Post-burn-in iterations; must be a multiple of --thin.
    #[arg(long, default_value_t = DEFAULT_ITERATIONS)]
    iters: usize,
    #[arg(long, default_value_t = DEFAULT_THIN)]
    thin: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Gamma prior on alpha, shape a and rate b; zeros give the 1/alpha reference prior.
    #[arg(long, default_value_t = 0.0)]
    prior_a: f64,
    #[arg(long, default_value_t = 0.0)]
    prior_b: f64,
    /// Gamma prior on beta, shape c and rate d; zeros give the 1/beta reference prior.
    #[arg(long, default_value_t = 0.0)]
    prior_c: f64,
    #[arg(long, default_value_t = 0.0)]
    prior_d: f64,
    /// Catalog durations are in days (divided by 365.25).
    #[arg(long)]
    days: bool,
    #[command(flatten)]
    out: OutArgs,
}

pub fn run(args: PosteriorArgs) -> Result<()> {
    let mut catalog = read_catalog(&args.catalog, args.days)?;
    let kind = match (args.model, args.class) {
        (ModelArg::Aggregate, _) => ModelKind::Aggregate,
        (ModelArg::Regression, _) => ModelKind::Regression,
        (ModelArg::Grouped, Some(class)) => {
            catalog = catalog.for_class(class.into())?;
            ModelKind::GroupedClass
        }
        (ModelArg::Grouped, None) => return Err(usage("the grouped posterior needs --class")),
        (ModelArg::Exponential, _) => return Err(usage("no posterior sampler for the exponential model")),
    };
    let prior = PriorSpec::new(args.prior_a, args.prior_b, args.prior_c, args.prior_d)?;
    let config = McmcConfig {
        burn_in: args.burn_in,
        iterations: args.iters,
        thin: args.thin,
        seed: args.seed,
        proposal_scales: None,
    };
    let chain = run_mh(kind, &catalog, &prior, &config)?;

    let mut csv = Vec::new();
    write_chain_csv(&chain, &mut csv)?;
    let mut doc = serde_json::to_value(&chain.provenance)?;
    if let Value::Object(map) = &mut doc {
        map.insert("class".into(), json!(args.class.map(domecast::CompositionClass::from)));
        map.insert("draws".into(), json!(chain.len()));
        let summary = if chain.len() >= MIN_SUMMARY_DRAWS { Some(chain_summary(&chain)?) } else { None };
        map.insert("summary".into(), serde_json::to_value(summary)?);
    }
    write_atomic(&args.out.out, "chain.csv", &csv)?;
    write_json(&args.out.out, "chain.json", &doc)?;
    Ok(())
}
