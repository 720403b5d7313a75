use thiserror::Error;

/// Errors produced by the evaluators, bound rules, search and verifiers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum IneqError {
    /// A parameter violates the domain of the statement being evaluated.
    /// `constraint` names the violated condition, e.g. `"p ≥ 1"`.
    #[error("domain error: {constraint} violated ({context})")]
    Domain { constraint: &'static str, context: String },

    /// Input has no positive mass where the statement needs some.
    #[error("degenerate input: {0}")]
    Degenerate(String),

    /// A formula is singular at the requested point (e.g. `C(p,q,δ)` at p = 1).
    #[error("singularity: {0}")]
    Singular(String),

    /// Neither composite regime applies.
    #[error("regime error: q + r - q/p = {0} lies below 1")]
    Regime(f64),

    /// Malformed sequence data (negative, NaN or infinite term, empty list, length mismatch).
    #[error("invalid sequence: {0}")]
    InvalidSequence(String),

    #[error("unknown suite `{0}`")]
    UnknownSuite(String),

    #[error("invalid search configuration: {0}")]
    InvalidConfig(String),
}

impl IneqError {
    pub(crate) fn domain(constraint: &'static str, context: impl Into<String>) -> Self {
        IneqError::Domain {
            constraint,
            context: context.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, IneqError>;
