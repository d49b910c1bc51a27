use thiserror::Error;

/// Errors raised across the crate.
///
/// Sums over an incomplete spectrum are not errors: they carry a
/// completeness flag instead (see [`crate::sums::SumResult`]). Diagnostics
/// that need a grid beyond the horizon fail with `IncompleteSpectrum`.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("determinant {det} is not within {tol:e} of 1")]
    NonUnitDeterminant { det: f64, tol: f64 },

    #[error("matrix is singular (|det| = {0:e})")]
    SingularMatrix(f64),

    #[error("element is {0}, not hyperbolic or loxodromic")]
    NotLoxodromic(&'static str),

    #[error("complex length has non-positive real part {0}")]
    DegenerateLength(f64),

    #[error("ball enumeration exceeded the cap of {0} elements")]
    ExplosionLimit(usize),

    #[error("invalid cutoff descriptor: {0}")]
    InvalidDescriptor(String),

    #[error("operation not supported for cutoff kind {0}")]
    UnsupportedKind(&'static str),

    #[error("domain error: {0}")]
    DomainError(String),

    #[error("even trace formula needs an even test function, got odd kind {0}")]
    OddKind(&'static str),

    #[error("odd trace formula needs an odd test function, got even kind {0}")]
    EvenKind(&'static str),

    #[error("spectrum is only known up to {horizon}, but {needed} is required")]
    IncompleteSpectrum { needed: f64, horizon: f64 },

    #[error("no classes in the sample")]
    EmptySample,

    #[error("parse error at line {line}, field `{field}`: {message}")]
    ParseError {
        line: usize,
        field: String,
        message: String,
    },

    #[error("invariant violated at row {row}: {invariant}")]
    InvariantViolation { row: usize, invariant: String },

    #[error("i/o error: {0}")]
    IoError(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::IoError(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
