use std::path::PathBuf;

use crate::qos::Criterion;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("assignment has {got} genes but the instance has {expected} tasks")]
    AssignmentLengthMismatch { expected: usize, got: usize },

    #[error("gene {task} selects candidate {index}, but the task only has {len} candidates")]
    InvalidCandidateIndex { task: usize, index: usize, len: usize },

    #[error("invalid QoS vector: {0}")]
    InvalidQos(String),

    #[error("invalid problem instance: {0}")]
    InvalidInstance(String),

    #[error("invalid universe [{lo}, {hi}] for {variable}: lower bound must be below upper bound")]
    InvalidUniverse { variable: String, lo: f64, hi: f64 },

    #[error("invalid membership function parameters: {0}")]
    InvalidMembership(String),

    #[error("importance grade {0} is outside [0, 100]")]
    GradeOutOfRange(u32),

    #[error("term count mismatch: {variable} has {got} terms, the rank variable has {expected}")]
    TermCountMismatch { variable: String, expected: usize, got: usize },

    #[error("unknown term '{term}' for criterion {criterion}")]
    UnknownTerm { criterion: Criterion, term: String },

    #[error("genotype length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("constraint {criterion}/{term} has an empty interval [{q_min}, {q_max}]")]
    DegenerateConstraint { criterion: Criterion, term: String, q_min: f64, q_max: f64 },

    #[error("invalid GA configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid workload spec: {0}")]
    SpecInvalid(String),

    #[error("invalid experiment input: {0}")]
    InvalidExperiment(String),

    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },

    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),

    #[error("malformed CSV: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }
}
