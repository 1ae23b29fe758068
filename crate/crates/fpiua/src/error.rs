use thiserror::Error;

/// Errors across the crate. Verification *failures* are values (reports),
/// not errors; an `Error` means a contract was violated or an input was bad.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid format: {0}")]
    InvalidFormat(String),

    #[error("operation requires a non-NaN operand")]
    NanOperand,

    #[error("no successor/predecessor past infinity")]
    StepPastInfinity,

    #[error("operation requires a finite value, got {0}")]
    NonFinite(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("value is not in canonical form: {0}")]
    NonCanonical(String),

    #[error("interval bounds out of order or NaN")]
    BadInterval,

    #[error("network is malformed: {0}")]
    MalformedNetwork(String),

    #[error("networks cannot be composed at this junction: {0}")]
    IncompatibleJunction(String),

    #[error("program compilation requires the identity activation, got {0}")]
    NonIdentityActivation(String),

    #[error("rounding undecided: enclosure of {0} still straddles a rounding boundary at {1} bits")]
    RoundingUndecided(String, u32),

    #[error("activation fails the synthesis conditions: {0}")]
    ConditionFailed(String),

    #[error("internal consistency error: {0}")]
    InternalConsistency(String),

    #[error("synthesis failed: {0}")]
    Synthesis(String),

    #[error("classifier is not robust: {0}")]
    NotRobust(String),

    #[error("anchor outside classifier domain: {0}")]
    AnchorOutsideDomain(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}
