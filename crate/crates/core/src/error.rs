//! Error type shared by every solver module.
//!
//! Each variant carries the stable kebab-case code that the CLI prints on
//! stderr, so scripts can match on `invalid-dimension` etc. without parsing
//! prose.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid-dimension: {0}")]
    InvalidDimension(String),
    #[error("divergent-energy: {0}")]
    DivergentEnergy(String),
    #[error("degenerate-weight: {0}")]
    DegenerateWeight(String),
    #[error("truncation-error: {0}")]
    TruncationError(String),
    #[error("numeric-breakdown: {0}")]
    NumericBreakdown(String),
    #[error("invalid-density: {0}")]
    InvalidDensity(String),
    #[error("invalid-parameter: {0}")]
    InvalidParameter(String),
    #[error("singular-point: {0}")]
    SingularPoint(String),
    #[error("singular-evaluation: {0}")]
    SingularEvaluation(String),
    #[error("no-convergence: {0}")]
    NoConvergence(String),
    #[error("unsupported-index: {0}")]
    UnsupportedIndex(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("parse: {0}")]
    Parse(String),
}

impl Error {
    /// Stable machine-readable code, e.g. `invalid-dimension`.
    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidDimension(_) => "invalid-dimension",
            Error::DivergentEnergy(_) => "divergent-energy",
            Error::DegenerateWeight(_) => "degenerate-weight",
            Error::TruncationError(_) => "truncation-error",
            Error::NumericBreakdown(_) => "numeric-breakdown",
            Error::InvalidDensity(_) => "invalid-density",
            Error::InvalidParameter(_) => "invalid-parameter",
            Error::SingularPoint(_) => "singular-point",
            Error::SingularEvaluation(_) => "singular-evaluation",
            Error::NoConvergence(_) => "no-convergence",
            Error::UnsupportedIndex(_) => "unsupported-index",
            Error::Io(_) => "io",
            Error::Parse(_) => "parse",
        }
    }

    /// True for errors caused by bad input rather than a failed computation.
    /// The CLI maps these to exit code 2, the rest to exit code 3.
    pub fn is_validation(&self) -> bool {
        !matches!(self, Error::NumericBreakdown(_) | Error::NoConvergence(_))
    }
}
