use clap::{Args, ValueEnum};
use domecast::simulate::{
    generate, horizon_for_censored_fraction, recovery_study, CensoringRule, GeneratingModel, SilicaMixture, SimSpec,
};
use domecast::{ExpParams, GPaParams, RegressionParams, Result};
use serde_json::json;

use super::{usage, OutArgs};
use crate::output::{write_atomic, write_json};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FamilyArg {
    Gpa,
    Regression,
    Exponential,
}

#[derive(Debug, Args)]
struct SpecArgs {
    #[arg(long, value_enum, default_value = "gpa")]
    family: FamilyArg,
    #[arg(long, default_value_t = 0.6487)]
    alpha: f64,
    #[arg(long, default_value_t = 0.7018)]
    beta: f64,
    #[arg(long, default_value_t = 0.0447)]
    gamma_alpha: f64,
    #[arg(long, default_value_t = 0.1302)]
    gamma_beta: f64,
    /// Rate of the exponential family.
    #[arg(long, default_value_t = 0.339)]
    lambda: f64,
    /// Number of eruptions per catalog.
    #[arg(long, default_value_t = 177)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Start eruptions uniformly over the last HORIZON years and censor at the end.
    #[arg(long, group = "censoring")]
    horizon: Option<f64>,
    /// Like --horizon, with the horizon chosen to censor this expected fraction.
    #[arg(long, group = "censoring")]
    censored_fraction: Option<f64>,
    /// Mark each eruption ongoing with this probability, cutting its duration uniformly.
    #[arg(long, group = "censoring")]
    random_censoring: Option<f64>,
}

impl SpecArgs {
    fn spec(&self) -> Result<SimSpec> {
        let model = match self.family {
            FamilyArg::Gpa => GeneratingModel::GPa {
                params: GPaParams::new(self.alpha, self.beta)?,
            },
            FamilyArg::Regression => GeneratingModel::Regression {
                params: RegressionParams::new(self.alpha, self.beta, self.gamma_alpha, self.gamma_beta)?,
                silica: SilicaMixture::default(),
            },
            FamilyArg::Exponential => GeneratingModel::Exponential {
                params: ExpParams::new(self.lambda)?,
            },
        };
        let censoring = match (self.horizon, self.censored_fraction, self.random_censoring) {
            (Some(horizon), _, _) => CensoringRule::FixedHorizon { horizon },
            (_, Some(p), _) => {
                if self.family == FamilyArg::Exponential {
                    return Err(usage("--censored-fraction needs a generalized Pareto family"));
                }
                // The regression family uses its baseline law to set the horizon.
                let base = GPaParams::new(self.alpha, self.beta)?;
                CensoringRule::FixedHorizon {
                    horizon: horizon_for_censored_fraction(&base, p)?,
                }
            }
            (_, _, Some(fraction)) => CensoringRule::RandomFraction { fraction },
            _ => CensoringRule::None,
        };
        let spec = SimSpec {
            model,
            n: self.n,
            censoring,
            seed: self.seed,
        };
        spec.validate()?;
        Ok(spec)
    }
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    spec: SpecArgs,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Debug, Args)]
pub struct RecoveryArgs {
    #[command(flatten)]
    spec: SpecArgs,
    /// Number of synthetic catalogs to fit (at least 10).
    #[arg(long, default_value_t = 100)]
    reps: usize,
    #[command(flatten)]
    out: OutArgs,
}

pub fn run_simulate(args: SimulateArgs) -> Result<()> {
    let catalog = generate(&args.spec.spec()?)?;
    write_atomic(&args.out.out, "catalog.csv", catalog.to_csv_string().as_bytes())?;
    Ok(())
}

pub fn run_recovery(args: RecoveryArgs) -> Result<()> {
    let report = recovery_study(&args.spec.spec()?, args.reps)?;
    let doc = json!({"schema": domecast::SCHEMA, "recovery": report});
    write_json(&args.out.out, "recovery.json", &doc)?;
    Ok(())
}
