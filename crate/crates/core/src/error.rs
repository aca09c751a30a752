use thiserror::Error;

use crate::glin::Bidegree;

/// Failures shared across the pipeline.
///
/// `TruncationExceeded` is never a stand-in for zero: it means a computation
/// needed data from outside the window the caller supplied.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("truncation exceeded at bidegree {0}")]
    TruncationExceeded(Bidegree),
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("invalid gamma: {0}")]
    InvalidGamma(String),
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("invariant violated: {0}")]
    InvariantViolation(String),
    #[error("Massey product undefined at stage {stage}")]
    UndefinedMassey { stage: usize },
    #[error("input is not minimal: {0}")]
    NotMinimal(String),
    #[error("arity {arity} exceeds the computed bound {bound}")]
    ArityExceeded { arity: usize, bound: usize },
    #[error("Stasheff identity fails: {0}")]
    StasheffViolation(String),
}

pub type Result<T> = std::result::Result<T, Error>;
