//! Error type shared by every module.

use alloc::string::String;

/// Failures raised by the engine.
///
/// Variants carrying a `String` hold a human readable diagnostic; the
/// structured ones are matched on by callers (the CLI maps `NotNice` and
/// `UnsupportedLocus` to a distinct exit status).
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("coefficient rings or charts of the operands differ")]
    RingMismatch,
    #[error("coordinate index {index} out of range for {nvars} coordinates")]
    IndexOutOfRange { index: usize, nvars: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("operation needs an artinian coefficient ring")]
    NotArtinian,
    #[error("operation needs field coefficients")]
    NotField,
    #[error("center is not permissible for pair {pair}")]
    NotPermissible { pair: usize },
    #[error("ideal membership is undecidable for this generating set")]
    UndecidableMembership,
    #[error("condition (iota) fails: {0}")]
    ConditionIotaFails(String),
    #[error("object is not nice: {0}")]
    NotNice(String),
    #[error("locus outside the aligned candidate lattice: {0}")]
    UnsupportedLocus(String),
    #[error("no termination within the step cap of {0}")]
    NonTermination(usize),
    #[error("misaligned data: {0}")]
    Misaligned(String),
    #[error("point is not in the singular set")]
    NotSingular,
    #[error("limit exceeded: {0}")]
    LimitExceeded(String),
    #[error("parse error at {line}:{col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = core::result::Result<T, Error>;
