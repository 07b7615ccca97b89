use std::path::PathBuf;

use thiserror::Error;

use crate::group::GroupError;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error("invalid group spec '{input}': {message}")]
    Spec { input: String, message: String },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("group {spec} has order {order}, above the cap of {cap}")]
    OrderCap { spec: String, order: u128, cap: usize },
    #[error("{what} needs about {required} steps, above the budget of {budget}{hint}")]
    Budget {
        what: &'static str,
        required: u128,
        budget: u128,
        hint: &'static str,
    },
    #[error("invalid argument: {0}")]
    Argument(String),
    /// A proved guarantee failed to hold, which can only mean a bug.
    #[error("soundness check failed: {0}")]
    Soundness(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Fails with [`Error::Budget`] when `required` exceeds `budget`.
pub(crate) fn check_budget(
    what: &'static str,
    required: u128,
    budget: u128,
    hint: &'static str,
) -> Result<()> {
    if required > budget {
        Err(Error::Budget {
            what,
            required,
            budget,
            hint,
        })
    } else {
        Ok(())
    }
}
