//! Error type shared by all modules of the crate.

use thiserror::Error;

/// Errors surfaced by polynomial construction, model enumeration, quantum
/// evaluation and classification.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid party count {0}: must be at least 1")]
    InvalidPartyCount(usize),

    #[error("party count {n} exceeds the limit {limit} for {what}")]
    PartyCountTooLarge { n: usize, limit: usize, what: &'static str },

    #[error("group count m={m} out of range for n={n} parties")]
    GroupCountOutOfRange { n: usize, m: usize },

    #[error("party index {index} out of range for n={n}")]
    PartyIndexOutOfRange { index: usize, n: usize },

    #[error("dimension mismatch: polynomial has {poly} parties, table has {table}")]
    DimensionMismatch { poly: usize, table: usize },

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("invalid party subset: {0}")]
    InvalidSubset(String),

    #[error("enumeration budget exceeded: {candidates} candidates, limit {limit}")]
    BudgetExceeded { candidates: u128, limit: u128 },

    #[error("correlation value {0} outside [-1, 1]")]
    CorrelationOutOfRange(f64),

    #[error("settings must provide one entry per party: expected {expected}, got {got}")]
    SettingsLengthMismatch { expected: usize, got: usize },

    #[error("closed-form W evaluation requires identical settings for all parties")]
    SettingsNotIdentical,

    #[error("state vector is not normalized (norm^2 = {0})")]
    NotNormalized(f64),

    #[error("GHZ angle {0} outside the canonical range [0, pi/4]")]
    GhzAngleOutOfRange(f64),

    #[error("observed value {value} exceeds the algebraic bound {bound}")]
    UnphysicalValue { value: f64, bound: f64 },

    #[error("no value supplied to classify")]
    NoValueSupplied,

    #[error("optimizer budget must be nonzero")]
    ZeroBudget,

    #[error("optimization failed to converge: {0}")]
    NonConvergence(String),

    #[error("{0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
