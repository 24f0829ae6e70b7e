use thiserror::Error;

use crate::model::Outcome;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Dimension mismatch or malformed structure (agent revisited, wrong arity, ...).
    #[error("structural error: {0}")]
    Structural(String),

    #[error("validation error at {path}: {message}")]
    Validation { path: String, message: String },

    #[error("feasible family is not downward-closed: {member} is feasible but {missing} is not")]
    NotDownwardClosed { member: Outcome, missing: Outcome },

    #[error("incomplete decision list: no entry fires at profile {profile}")]
    IncompleteList { profile: String },

    #[error("grid extension required: {0}")]
    GridExtension(String),

    #[error("prerequisite failed: {property} does not hold ({detail})")]
    Prerequisite { property: String, detail: String },

    #[error("not applicable: {0}")]
    Applicability(String),

    #[error("{what}: search space has {cardinality} candidates, limit is {limit}")]
    SizeLimit {
        what: String,
        cardinality: String,
        limit: String,
    },

    #[error("independence required: prior must be a product distribution")]
    IndependenceRequired,

    #[error("IC required: rwsg witness construction needs an incentive-compatible table")]
    IcRequired,

    #[error(
        "NB violation: agents {first} and {second} appear in each other's exception lists \
         (forbidden in a single-item list); witness profile {witness}"
    )]
    MutualExceptions {
        first: usize,
        second: usize,
        witness: String,
    },

    #[error("NB violation: domination relation has a 3-cycle {0} -> {1} -> {2} -> {0}")]
    DominationCycle(usize, usize, usize),

    #[error("tabulation mismatch: {0}")]
    Mismatch(String),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn validation(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Validation {
            path: path.into(),
            message: message.into(),
        }
    }

    pub fn structural(message: impl Into<String>) -> Self {
        Error::Structural(message.into())
    }
}
