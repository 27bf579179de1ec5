use thiserror::Error;

/// Errors raised by the analysis and synthesis routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("cannot parse number {0:?}")]
    Parse(String),

    #[error("invalid sequence: {0}")]
    InvalidSequence(String),

    #[error("length mismatch: {left} vs {right} (pad the shorter vector with explicit zeros)")]
    Shape { left: usize, right: usize },

    #[error("index {index} out of range 1..={len}")]
    Range { index: usize, len: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("polynomial is not divisible by (1 - s): value at 1 is {0}")]
    Divisibility(String),

    #[error("factor is not in the positive-series class on (0, R]: {0}")]
    FactorInfeasible(String),

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("conditions violated: {0}")]
    ConditionsViolated(String),

    #[error("refused: {0}")]
    Refused(String),

    #[error("synthesis failed after {attempts} attempts: {reason}")]
    SynthesisFailed { attempts: usize, reason: String },

    #[error("size cap exceeded: {size} product entries > cap {cap}")]
    SizeCap { size: u128, cap: u128 },
}

pub type Result<T> = std::result::Result<T, Error>;
