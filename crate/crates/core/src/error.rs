use thiserror::Error;

/// Errors raised by the numerical routines in this crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("ensemble size must be at least 1, got {0}")]
    InvalidEnsembleSize(u32),

    #[error("non-finite argument: {0}")]
    NonFinite(&'static str),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("Taylor coefficient {index} violates the growth bound for type {sigma} (ratio {ratio:.3e} exceeds {limit:.3e})")]
    GrowthViolation {
        index: usize,
        sigma: f64,
        ratio: f64,
        limit: f64,
    },

    #[error("tridiagonal eigensolver exceeded {budget} iterations at index {index}")]
    EigenNoConvergence { index: usize, budget: usize },

    #[error("sample {sample}: {source}")]
    Sampling {
        sample: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("integration did not reach tolerance {tol:.1e} within {budget} panels (estimate {estimate:.3e})")]
    IntegrationBudget {
        tol: f64,
        budget: usize,
        estimate: f64,
    },

    #[error("Stirling table size {requested} exceeds the 128-bit cap of {cap}")]
    StirlingCap { requested: usize, cap: usize },

    #[error("inner series tail bound {bound:.3e} exceeds requested accuracy {tol:.3e}")]
    SeriesTail { bound: f64, tol: f64 },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
