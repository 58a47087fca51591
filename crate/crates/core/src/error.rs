use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("theta estimate undefined for a task with no responses")]
    UndefinedEstimate,

    #[error("empty {0}")]
    Empty(&'static str),

    #[error("budget exhausted at t = {0}")]
    BudgetExhausted(u64),

    #[error("replay pool exhausted")]
    PoolExhausted,

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{path}:{line}: {msg}")]
    Parse {
        path: PathBuf,
        line: u64,
        msg: String,
    },

    #[error("dataset {dataset}: task {task}: {msg}")]
    Validation {
        dataset: String,
        task: String,
        msg: String,
    },

    #[error("mismatched replication counts: {0} traces vs {1} baselines")]
    Mismatch(usize, usize),

    #[error("I/O error on {path}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
