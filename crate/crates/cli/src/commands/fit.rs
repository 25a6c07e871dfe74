use std::path::{Path, PathBuf};

use clap::Args;
use domecast::fit::{fit_aggregate, fit_exponential, fit_grouped, fit_regression, Family, ModelScore};
use domecast::{Catalog, CompositionClass, FitResult, ModelKind, Result};
use serde_json::{json, Map, Value};

use super::{usage, ClassArg, ModelArg, OutArgs};
use crate::output::{read_catalog, read_json, write_json};

#[derive(Debug, Args)]
pub struct FitArgs {
    /// Catalog CSV.
    catalog: PathBuf,
    #[arg(long, value_enum, default_value = "aggregate")]
    model: ModelArg,
    /// Composition class for the grouped model; all classes when omitted.
    #[arg(long, value_enum)]
    class: Option<ClassArg>,
    /// Distribution family for the grouped model.
    #[arg(long, value_enum, default_value = "gpa")]
    family: FamilyArg,
    /// Drop ongoing eruptions before fitting.
    #[arg(long)]
    completed_only: bool,
    /// Catalog durations are in days (divided by 365.25).
    #[arg(long)]
    days: bool,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum FamilyArg {
    Gpa,
    Exponential,
}

impl From<FamilyArg> for Family {
    fn from(f: FamilyArg) -> Self {
        match f {
            FamilyArg::Gpa => Family::GPa,
            FamilyArg::Exponential => Family::Exponential,
        }
    }
}

/// JSON for one fit: estimates and errors at top level, full result nested.
pub fn fit_document(fit: &FitResult, model: &str) -> Value {
    let mut doc = Map::new();
    doc.insert("schema".into(), json!(domecast::SCHEMA));
    doc.insert("model".into(), json!(model));
    doc.insert(
        "family".into(),
        json!(if fit.model_kind == ModelKind::Exponential { "exponential" } else { "gpa" }),
    );
    if let Some(class) = fit.class {
        doc.insert("class".into(), json!(class));
    }
    for (name, v) in &fit.estimates {
        doc.insert(name.clone(), json!(v));
    }
    for name in fit.estimates.keys() {
        doc.insert(format!("se_{name}"), json!(fit.standard_error(name)));
    }
    doc.insert("nllh".into(), json!(fit.nllh_at_mle));
    doc.insert("aic".into(), json!(fit.aic()));
    doc.insert("bic".into(), json!(fit.bic()));
    doc.insert("n".into(), json!(fit.n));
    doc.insert("n1".into(), json!(fit.n1));
    doc.insert("k".into(), json!(fit.k));
    doc.insert("converged".into(), json!(fit.converged));
    doc.insert("fit".into(), serde_json::to_value(fit).expect("fit serializes"));
    Value::Object(doc)
}

/// Reads a single-model fit document written by `fit`.
pub fn load_fit(path: &Path) -> Result<FitResult> {
    let doc = read_json(path)?;
    let Some(fit) = doc.get("fit") else {
        return Err(usage(format!(
            "{} holds several fits; refit a single model (grouped fits need --class)",
            path.display()
        )));
    };
    Ok(serde_json::from_value(fit.clone())?)
}

/// Grouped fits of every class present in the catalog.
pub fn grouped_fits(catalog: &Catalog, family: Family) -> Result<Vec<FitResult>> {
    CompositionClass::ALL
        .iter()
        .filter(|c| catalog.records().iter().any(|r| r.composition_class == **c))
        .map(|&c| fit_grouped(catalog, c, family))
        .collect()
}

pub fn run(args: FitArgs) -> Result<()> {
    let mut catalog = read_catalog(&args.catalog, args.days)?;
    if args.completed_only {
        catalog = catalog.completed_only()?;
    }
    let family = Family::from(args.family);
    let doc = match (args.model, args.class) {
        (ModelArg::Aggregate, _) => fit_document(&fit_aggregate(&catalog)?, "aggregate"),
        (ModelArg::Exponential, _) => fit_document(&fit_exponential(&catalog)?, "exponential"),
        (ModelArg::Regression, _) => fit_document(&fit_regression(&catalog)?, "regression"),
        (ModelArg::Grouped, Some(class)) => fit_document(&fit_grouped(&catalog, class.into(), family)?, "grouped"),
        (ModelArg::Grouped, None) => {
            let fits = grouped_fits(&catalog, family)?;
            let score = ModelScore::from_fits("grouped", &fits)?;
            json!({
                "schema": domecast::SCHEMA,
                "model": "grouped",
                "family": if family == Family::GPa { "gpa" } else { "exponential" },
                "fits": fits.iter().map(|f| fit_document(f, "grouped")).collect::<Vec<_>>(),
                "nllh": score.nllh,
                "aic": score.aic,
                "bic": score.bic,
                "n": score.n,
                "k": score.k,
            })
        }
    };
    write_json(&args.out.out, "fit.json", &doc)?;
    Ok(())
}
