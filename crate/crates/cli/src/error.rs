use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read config {path}: {source}")]
    ReadConfig { path: PathBuf, source: std::io::Error },
    #[error("config does not parse: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("invalid config: {0}")]
    Validation(String),
    #[error("numerical failure at k = {k}: {message}")]
    Numerical { k: f64, message: String },
    #[error("numerical failure: {0}")]
    Simulation(String),
    #[error("{path}: missing column(s) {missing:?} for layout {layout}")]
    HeaderMismatch { path: PathBuf, layout: String, missing: Vec<String> },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    /// 1 for anything wrong with the inputs, 2 when the numerics give up.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Numerical { .. } | CliError::Simulation(_) => 2,
            _ => 1,
        }
    }
}

pub(crate) fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Validation(msg.into())
}
