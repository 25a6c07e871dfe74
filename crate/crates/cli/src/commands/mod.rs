mod compare;
mod empirical;
mod fit;
mod forecast;
mod gof;
mod posterior;
mod simulate;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use domecast::{CompositionClass, Error, Result};

#[derive(Debug, Parser)]
#[command(name = "domecast", version, about = "Generalized Pareto duration models for lava dome eruption catalogs")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Maximum-likelihood fit; writes fit.json.
    Fit(fit::FitArgs),
    /// Chi-square goodness of fit of a fitted model; writes gof.json.
    Gof(gof::GofArgs),
    /// AIC/BIC comparison of aggregate, grouped and regression fits; writes compare.json.
    Compare(compare::CompareArgs),
    /// Metropolis–Hastings posterior sample; writes chain.csv and chain.json.
    Posterior(posterior::PosteriorArgs),
    /// Remaining-duration forecast from a chain or a fit; writes forecast.csv and forecast.json.
    Forecast(forecast::ForecastArgs),
    /// Synthetic catalog; writes catalog.csv.
    Simulate(simulate::SimulateArgs),
    /// Estimator recovery study on synthetic catalogs; writes recovery.json.
    Recovery(simulate::RecoveryArgs),
    /// Empirical exceedance fractions, model curves and median shifts as CSV.
    Empirical(empirical::EmpiricalArgs),
}

#[derive(Debug, Clone, Args)]
pub struct OutArgs {
    /// Directory receiving the output files.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelArg {
    Aggregate,
    Grouped,
    Regression,
    Exponential,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ClassArg {
    Mafic,
    Intermediate,
    Evolved,
}

impl From<ClassArg> for CompositionClass {
    fn from(c: ClassArg) -> Self {
        match c {
            ClassArg::Mafic => CompositionClass::Mafic,
            ClassArg::Intermediate => CompositionClass::Intermediate,
            ClassArg::Evolved => CompositionClass::Evolved,
        }
    }
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Fit(a) => fit::run(a),
        Command::Gof(a) => gof::run(a),
        Command::Compare(a) => compare::run(a),
        Command::Posterior(a) => posterior::run(a),
        Command::Forecast(a) => forecast::run(a),
        Command::Simulate(a) => simulate::run_simulate(a),
        Command::Recovery(a) => simulate::run_recovery(a),
        Command::Empirical(a) => empirical::run(a),
    }
}

pub fn usage(message: impl Into<String>) -> Error {
    Error::Usage(message.into())
}
