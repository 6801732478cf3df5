use thiserror::Error;

use crate::scenario::Violation;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("scenario rejected: {}", format_violations(.0))]
    InvalidScenario(Vec<Violation>),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("precondition failed for {what}: {detail}")]
    Precondition { what: String, detail: String },

    #[error("time step violates stability: dt^2 * |lambda_max| = {product:.6} > 4")]
    Cfl { product: f64 },

    #[error(
        "source tail outside the window is {tail:.3e}, above the allowed {limit:.3e}; \
         start the window near t = {suggested:.1}"
    )]
    TailTooLarge { tail: f64, limit: f64, suggested: f64 },

    #[error("smallness violated: {0}")]
    NotContracting(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("config: {0}")]
    Config(String),

    #[error("certification failed: {0}")]
    Certification(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

fn format_violations(v: &[Violation]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
}

impl Error {
    /// Short machine-readable tag.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidScenario(_) => "invalid_scenario",
            Error::InvalidInput(_) => "invalid_input",
            Error::Precondition { .. } => "precondition",
            Error::Cfl { .. } => "cfl",
            Error::TailTooLarge { .. } => "tail_too_large",
            Error::NotContracting(_) => "not_contracting",
            Error::Numerical(_) => "numerical",
            Error::Config(_) => "config",
            Error::Certification(_) => "certification",
            Error::Io(_) => "io",
            Error::Csv(_) => "csv",
            Error::Json(_) => "json",
        }
    }

    /// One entry per problem; scenario rejections list every violated constraint.
    pub fn details(&self) -> Vec<(String, String)> {
        match self {
            Error::InvalidScenario(v) => {
                v.iter().map(|x| (x.constraint.name().to_string(), x.detail.clone())).collect()
            }
            Error::Precondition { what, detail } => vec![(what.clone(), detail.clone())],
            other => vec![(other.kind().to_string(), other.to_string())],
        }
    }

    /// Process exit code used by the command line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidScenario(_)
            | Error::InvalidInput(_)
            | Error::Precondition { .. }
            | Error::Cfl { .. }
            | Error::Config(_) => 2,
            Error::Certification(_) => 4,
            _ => 3,
        }
    }
}
