//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by model construction, estimation, and the CLI layer.
#[derive(Debug, Error)]
pub enum Error {
    /// A value violates a domain precondition (rank out of range, negative
    /// density, and so on).
    #[error("domain error: {0}")]
    Domain(String),

    /// A continuous approximation was requested outside the regime where it
    /// is defined (e.g. Zipf shape >= 1 for the power-law prefix sums).
    #[error("approximation domain error: {0}")]
    ApproxDomain(String),

    /// The interference integral diverges (pathloss exponent <= 2).
    #[error("divergence: {0}")]
    Divergence(String),

    /// A caller-supplied argument is unusable (zero budget, bad grid step).
    #[error("invalid argument: {0}")]
    Argument(String),

    /// Config file could not be parsed; carries the 1-based line number.
    #[error("config parse error at line {line}: {message}")]
    ConfigParse { line: usize, message: String },

    /// A config value failed validation; names the offending key.
    #[error("config error: key '{key}': {message}")]
    ConfigValue { key: String, message: String },

    /// An override or point parameter key is not recognized.
    #[error("unknown key '{key}'")]
    UnknownKey { key: String },

    /// Figure name not recognized; lists what is available.
    #[error("unknown figure '{name}'; available: {available}")]
    UnknownFigure { name: String, available: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code for the CLI: 2 for configuration problems,
    /// 3 for numerical-precondition failures, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::ConfigParse { .. }
            | Error::ConfigValue { .. }
            | Error::UnknownKey { .. }
            | Error::UnknownFigure { .. } => 2,
            Error::Domain(_)
            | Error::ApproxDomain(_)
            | Error::Divergence(_)
            | Error::Argument(_) => 3,
            Error::Io(_) => 1,
        }
    }
}
