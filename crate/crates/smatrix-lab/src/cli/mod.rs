//! Experiment runner: structured configs in, reports and plot-ready CSV
//! files out. One experiment per invocation; operators are cached on disk
//! keyed by their defining fields.

mod config;
mod experiments;
mod report;

pub use config::{Experiment, ExperimentConfig, PotentialConfig};
pub use experiments::{cache_key, phase_oracle_gap, run, RunOutcome};
pub use report::{fmt12, write_csv, Prov, Report};

use thiserror::Error;

/// Failure modes with distinct process exit codes.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("numeric failure: {0}")]
    Numeric(String),
    #[error("contract violation: {0}")]
    Contract(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numeric(_) => 3,
            CliError::Contract(_) => 4,
        }
    }
}

impl From<crate::phase::PhaseError> for CliError {
    fn from(e: crate::phase::PhaseError) -> Self {
        CliError::Numeric(e.to_string())
    }
}

impl From<crate::circleop::OperatorError> for CliError {
    fn from(e: crate::circleop::OperatorError) -> Self {
        CliError::Numeric(e.to_string())
    }
}

impl From<crate::spectral::SpectralError> for CliError {
    fn from(e: crate::spectral::SpectralError) -> Self {
        CliError::Numeric(e.to_string())
    }
}

impl From<crate::quad::QuadError> for CliError {
    fn from(e: crate::quad::QuadError) -> Self {
        CliError::Numeric(e.to_string())
    }
}

impl From<crate::potentials::PotentialError> for CliError {
    fn from(e: crate::potentials::PotentialError) -> Self {
        CliError::Numeric(e.to_string())
    }
}

impl From<crate::oracle::OracleError> for CliError {
    fn from(e: crate::oracle::OracleError) -> Self {
        CliError::Numeric(e.to_string())
    }
}

impl From<crate::linalg::LinalgError> for CliError {
    fn from(e: crate::linalg::LinalgError) -> Self {
        CliError::Numeric(e.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::CliError;

    #[test]
    fn exit_codes_distinguish_failure_classes() {
        assert_eq!(CliError::Config("x".into()).exit_code(), 2);
        assert_eq!(CliError::Numeric("x".into()).exit_code(), 3);
        assert_eq!(CliError::Contract("x".into()).exit_code(), 4);
    }
}
