use thiserror::Error;

/// Errors across the library. Variant names follow the failure they signal so
/// that callers (and the CLI) can report the violated precondition by name.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("priors must sum to 1 (got {0})")]
    InvalidPrior(f64),

    #[error("probability out of range: {0}")]
    InvalidProbability(f64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("length mismatch: expected {expected} bits, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("degenerate ensemble: average state is numerically zero")]
    DegenerateEnsemble,

    #[error("infeasible scale: key space 2^{0} exceeds the search cap 2^{1}")]
    InfeasibleScale(usize, usize),

    #[error("empty message space: no forgery candidate M' != M exists")]
    EmptyMessageSpace,

    #[error("syndrome decoding failure: no coset leader within radius {0}")]
    DecodingFailure(usize),

    #[error("privacy amplification key length non-positive: {0}")]
    KeyLengthNonpositive(i64),

    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
