use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("arm index {arm} out of range for K={k} (arms are 1..=K externally)")]
    ArmOutOfRange { arm: usize, k: usize },

    #[error("graph is not observable: arm {arm} has no in-neighbors")]
    NotObservable { arm: usize },

    #[error("duplicate edge ({i}, {j})")]
    DuplicateEdge { i: usize, j: usize },

    #[error("invalid {what}: {why}")]
    InvalidInput { what: String, why: String },

    #[error("inconsistent policy state: {0}")]
    InternalState(String),

    #[error("{path}: line {line}: {why}")]
    Csv {
        path: String,
        line: usize,
        why: String,
    },

    #[error("replication with seed {seed} failed: {source}")]
    Replication {
        seed: u64,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(what: impl Into<String>, why: impl Into<String>) -> Self {
        Error::InvalidInput {
            what: what.into(),
            why: why.into(),
        }
    }

    /// True for errors caused by bad user input (configs, files, parameters),
    /// as opposed to runtime failures.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::ArmOutOfRange { .. }
                | Error::NotObservable { .. }
                | Error::DuplicateEdge { .. }
                | Error::InvalidInput { .. }
                | Error::Csv { .. }
        )
    }
}
