use thiserror::Error;

/// Failure modes shared by every module of the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// Invalid user-facing configuration (bad family parameters, empty ranges, ...).
    #[error("configuration error: {0}")]
    Config(String),

    /// Input outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// An inequality or construction whose hypotheses are not met.
    #[error("not applicable: {0}")]
    NotApplicable(String),

    /// A series tail could not be certified below the requested tolerance.
    #[error("series truncation failed after {terms} terms (tail bound {tail:e})")]
    Truncation { terms: usize, tail: f64 },

    /// A linear solve lost all significant digits at the working precision.
    #[error(
        "precision insufficient at {digits} digits (log10 condition estimate {log10_condition:.1})"
    )]
    PrecisionInsufficient { digits: u32, log10_condition: f64 },

    /// Quadrature or eigen-iteration failed to converge.
    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
