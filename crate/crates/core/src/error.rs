use thiserror::Error;

/// Everything that can go wrong anywhere in the library.
///
/// Variants are grouped so that a driver can map them onto exit codes:
/// caller mistakes, theorem checks that failed, requests beyond what the
/// embedded data can certify, and internal self-checks.
#[derive(Debug, Error)]
pub enum Error {
    #[error("unsupported modulus {0}: expected an odd positive integer")]
    UnsupportedModulus(String),
    #[error("invalid prime {0}")]
    InvalidPrime(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("polynomial modulus must have degree at least 1")]
    ZeroModulus,
    #[error("invalid discriminant {0}")]
    InvalidDiscriminant(i64),
    #[error("discriminant {0} is outside the supported range")]
    DiscriminantTooLarge(i64),
    #[error("requested precision of {0} bits is below the 64-bit minimum")]
    PrecisionTooLow(u32),
    #[error("class polynomial for d = {d} did not round cleanly at {bits} bits")]
    PrecisionFailure { d: i64, bits: u32 },
    #[error("modular polynomial of level {0} is not embedded")]
    UnsupportedLevel(u64),
    #[error("level {0} equals the characteristic (inseparable case)")]
    InseparableLevel(u64),
    #[error("malformed table: {0}")]
    MalformedTable(String),
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("j = {j} lies in two partition classes (D = {first} and D = {second})")]
    PartitionConflict { j: String, first: i64, second: i64 },
    #[error("proportion undefined: the atlas is empty")]
    UndefinedProportion,
    #[error("cannot certify bound {bound}: prime {missing} is not in the graph's prime set")]
    CoverageRefused { bound: u64, missing: u64 },
    #[error("theorem violation: {0}")]
    TheoremViolation(String),
    #[error("not applicable: {0}")]
    NotApplicable(String),
    #[error("order is not maximal (discriminant {0})")]
    NonMaximalOrder(String),
    #[error("internal consistency check failed: {0}")]
    Internal(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
