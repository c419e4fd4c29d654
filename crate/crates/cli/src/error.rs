use std::path::PathBuf;

use rmabf_core::{EnvError, HarnessError, LearnerError, LpError, ModelError};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error("invalid config: {0}")]
    Config(String),
    #[error("writing CSV to {path}: {source}")]
    Csv {
        path: String,
        #[source]
        source: csv::Error,
    },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Env(#[from] EnvError),
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error(transparent)]
    Learner(#[from] LearnerError),
    #[error(transparent)]
    Harness(#[from] HarnessError),
}
