use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("unknown token {token:?} in {space} vocabulary")]
    UnknownToken { token: String, space: &'static str },

    #[error("steps were encoded against different encoding tables")]
    MixedTable,

    #[error("solution {id:?}: {source}")]
    Solution {
        id: String,
        #[source]
        source: Box<Error>,
    },

    #[error("unknown node {0:?}")]
    UnknownNode(String),

    #[error("node {0:?} is not reachable from the root")]
    UnreachableNode(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("at least {needed} samples are required, got {got}")]
    TooFewSamples { needed: usize, got: usize },

    #[error("tree has {available} nodes, {requested} requested")]
    InsufficientNodes { available: usize, requested: usize },

    #[error("schema violation at {path}: {message}")]
    Schema { path: String, message: String },

    #[error("invalid solution set {label:?}: {}", violations.join("; "))]
    InvalidSet { label: String, violations: Vec<String> },
}

impl Error {
    pub(crate) fn in_solution(self, id: &str) -> Error {
        Error::Solution {
            id: id.to_string(),
            source: Box::new(self),
        }
    }

    pub(crate) fn schema(path: impl Into<String>, message: impl Into<String>) -> Error {
        Error::Schema {
            path: path.into(),
            message: message.into(),
        }
    }
}
