use thiserror::Error;

use crate::gmetrics::Axiom;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("expected a tuple of length {expected}, got {got}")]
    WrongArity { expected: usize, got: usize },

    #[error("unknown point `{0}`")]
    UnknownPoint(String),

    #[error("point index {0} out of range")]
    PointOutOfRange(usize),

    #[error("duplicate point label `{0}`")]
    DuplicateLabel(String),

    #[error("point set must not be empty")]
    EmptyPointSet,

    #[error("axiom {axiom:?} requires k = {required}, table has k = {actual}")]
    AxiomArity { axiom: Axiom, required: usize, actual: usize },

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("invalid table: {0}")]
    InvalidTable(String),

    #[error("conflicting values for multiset {multiset}: {first} vs {second}")]
    ConflictingEntries { multiset: String, first: f64, second: f64 },

    #[error("table is not an H-metric: {0}")]
    NotHMetric(String),

    #[error("invalid pairwise metric: {0}")]
    InvalidMetric(String),

    #[error("sandwich bound violated on {multiset}: {detail}")]
    SandwichViolation { multiset: String, detail: String },

    #[error("invalid tree: {0}")]
    InvalidTree(String),

    #[error("invalid request: {0}")]
    InvalidRequest(String),

    #[error("work estimate {needed} exceeds budget {budget} ({what})")]
    BudgetExceeded { what: &'static str, needed: u128, budget: u128 },

    #[error("audit failed: {}", .0.join("; "))]
    Audit(Vec<String>),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn is_budget(&self) -> bool {
        matches!(self, Error::BudgetExceeded { .. })
    }
}
