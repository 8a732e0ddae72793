use thiserror::Error;

use crate::conditions::ConditionReport;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("length mismatch: {what} has {found} entries, expected {expected}")]
    LengthMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("complex coordinate in a real space ({0})")]
    ComplexInRealSpace(&'static str),

    #[error("invalid space: {0}")]
    InvalidSpace(String),

    #[error("invalid weights: {0}")]
    InvalidWeights(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("hypothesis violated for {sequence}: {} of {} indices fail, first at index {}",
        .report.failures().len(), .report.len(), .report.failures().first().copied().unwrap_or(0))]
    HypothesisViolated {
        sequence: &'static str,
        report: Box<ConditionReport>,
    },

    #[error("enclosure fitting failed: inflation factor {factor:.6} exceeds {limit}")]
    FittingFailure { factor: f64, limit: f64 },

    #[error("negative variance {value:e} beyond rounding tolerance")]
    NegativeVariance { value: f64 },

    #[error("invalid Hölder exponent {0}: must be > 1 or infinite")]
    InvalidHolder(f64),

    #[error("complex spaces are not supported here: {0}")]
    ComplexUnsupported(&'static str),

    #[error("gradient check failed for oracle `{name}`: max relative error {max_error:e}")]
    GradientCheck { name: String, max_error: f64 },

    #[error("unknown {kind} `{name}`")]
    Unknown { kind: &'static str, name: String },

    #[error("inequality violated: ratio {ratio} exceeds 1 for target {target}")]
    InequalityViolated {
        target: String,
        ratio: f64,
        witness: Box<crate::instance::Instance>,
    },

    #[error("{location}: {message}")]
    Parse { location: String, message: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
