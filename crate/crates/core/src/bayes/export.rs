use std::io::Write;

use super::PosteriorChain;
use crate::error::{Error, Result};
use crate::fit::ModelKind;

/// Writes one draw per row under a header naming the parameters.
pub fn write_chain_csv<W: Write>(chain: &PosteriorChain, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(chain.parameter_names())?;
    for d in &chain.draws {
        w.write_record(d.iter().map(|v| v.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a chain CSV. The header decides the model: `alpha,beta` or
/// `alpha,beta,gamma_alpha,gamma_beta`.
pub fn read_chain_csv(text: &str) -> Result<PosteriorChain> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let header: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    let kind = [ModelKind::Aggregate, ModelKind::Regression]
        .into_iter()
        .find(|k| k.parameter_names() == header.as_slice())
        .ok_or_else(|| Error::Parse {
            line: 1,
            message: format!("unrecognized chain header {:?}", header.join(",")),
        })?;
    let mut draws = Vec::new();
    for row in reader.records() {
        let row = row?;
        let line = row.position().map(|p| p.line()).unwrap_or(0);
        let draw = row
            .iter()
            .map(|f| {
                f.parse::<f64>().map_err(|_| Error::Parse {
                    line,
                    message: format!("not a number: {f:?}"),
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        draws.push(draw);
    }
    PosteriorChain::from_draws(kind, draws)
}
