use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("variable set mismatch: {0}")]
    VarsetMismatch(String),

    #[error("division by zero")]
    DivisionByZero,

    #[error("zero polynomial where a nonzero one is required: {0}")]
    ZeroInput(String),

    #[error("unassigned variable `{0}`")]
    Unassigned(String),

    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("unknown identifier `{name}` at line {line}, column {column}")]
    UnknownIdentifier {
        name: String,
        line: usize,
        column: usize,
    },

    #[error("resource ceiling exceeded: {terms} terms > limit {limit} ({context})")]
    ResourceCutoff {
        terms: usize,
        limit: usize,
        context: String,
    },

    #[error("pole: denominator vanishes in component {component}")]
    Pole { component: usize },

    #[error("unsolvable at stage {stage}: {reason}")]
    Unsolvable { stage: usize, reason: String },

    #[error("inconsistent system: {0}")]
    Inconsistent(String),

    #[error("substituted denominator vanishes identically at step {step}, component {component}")]
    VanishingDenominator { step: usize, component: usize },

    #[error("indeterminate component {component} at step {step}")]
    Indeterminate { step: usize, component: usize },

    #[error("derivation failed: {0}")]
    Derivation(String),

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("verification failed: {0}")]
    Verification(String),
}
