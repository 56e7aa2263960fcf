//! Command-line front end for the Gaussian quantum-speed-limit toolkit:
//! configuration parsing, the six subcommands, deterministic CSV/JSON
//! rendering, and the self-verification battery.

// Guards shaped like `!(x > 0.0)` are used instead of `x <= 0.0`: the
// negated form also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::fmt;

pub mod commands;
pub mod config;
pub mod output;
pub mod selftest;

/// Exit status when the verification battery reports a failure.
pub const EXIT_SELFTEST_FAILED: i32 = 1;
/// Exit status for configuration problems (bad file, bad flags, bad domain).
pub const EXIT_CONFIG_ERROR: i32 = 2;
/// Exit status when a computation fails numerically.
pub const EXIT_NUMERICAL_ERROR: i32 = 3;

/// What went wrong, split by who has to act: the caller fixes their
/// configuration, or the computation itself broke down.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CliError {
    /// The request cannot be built: unknown keys, missing fields, values
    /// outside the supported domain.
    Config(String),
    /// The request was well formed but the computation failed.
    Numerical(String),
}

impl CliError {
    /// Wraps any displayable cause as a configuration error.
    pub fn config(err: impl fmt::Display) -> Self {
        CliError::Config(err.to_string())
    }

    /// Wraps any displayable cause as a numerical failure.
    pub fn numerical(err: impl fmt::Display) -> Self {
        CliError::Numerical(err.to_string())
    }

    /// Process exit status for this error class.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG_ERROR,
            CliError::Numerical(_) => EXIT_NUMERICAL_ERROR,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "configuration error: {msg}"),
            CliError::Numerical(msg) => write!(f, "numerical failure: {msg}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<gqsl::Error> for CliError {
    fn from(err: gqsl::Error) -> Self {
        match err {
            gqsl::Error::InvalidArgument(_)
            | gqsl::Error::InvalidState(_)
            | gqsl::Error::Precondition(_) => CliError::Config(err.to_string()),
            _ => CliError::Numerical(err.to_string()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_track_the_error_class() {
        assert_eq!(CliError::config("bad").exit_code(), 2);
        assert_eq!(CliError::numerical("bad").exit_code(), 3);
    }

    #[test]
    fn library_errors_split_into_caller_and_computation_faults() {
        let config: CliError = gqsl::Error::InvalidArgument("n must be positive".into()).into();
        assert!(matches!(config, CliError::Config(_)));
        let numerical: CliError = gqsl::Error::NumericalFailure("matrix is singular".into()).into();
        assert!(matches!(numerical, CliError::Numerical(_)));
        let integration: CliError =
            gqsl::Error::IntegrationFailure { t: 1.0, message: "step error exceeds budget".into() }
                .into();
        assert_eq!(integration.exit_code(), 3);
    }
}
