use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Broad failure category, used by the command line to choose an exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// The caller asked for something that cannot be done with these inputs.
    Usage,
    /// The catalog or another input document is malformed or insufficient.
    Data,
    /// An optimizer, sampler or root finder failed.
    Numerical,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },

    #[error("invalid record: {0}")]
    InvalidRecord(String),

    #[error("empty catalog")]
    EmptyCatalog,

    #[error("invalid {name} = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("record {index} ({volcano}) has no silica_pct; the regression model needs it for every record")]
    MissingSilica { index: usize, volcano: String },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("improper posterior: {0}")]
    ImproperPosterior(String),

    #[error("{0}")]
    Usage(String),

    #[error("optimizer failed: {0}")]
    Optimizer(String),

    #[error("hessian is not positive definite: {0}")]
    NotPositiveDefinite(String),

    #[error("sampler failed: {0}")]
    Sampler(String),

    #[error("root bracket failure: {0}")]
    Bracket(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Usage(_) | Error::InvalidParameter { .. } => ErrorKind::Usage,
            Error::Optimizer(_)
            | Error::NotPositiveDefinite(_)
            | Error::Sampler(_)
            | Error::Bracket(_) => ErrorKind::Numerical,
            _ => ErrorKind::Data,
        }
    }

    pub(crate) fn invalid(name: &'static str, value: f64, reason: &'static str) -> Self {
        Error::InvalidParameter {
            name,
            value,
            reason,
        }
    }
}
