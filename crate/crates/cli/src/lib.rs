//! Experiment runner: configuration, subjects, the five subcommands and
//! their CSV/JSON outputs.

pub mod commands;
pub mod config;
pub mod output;
pub mod subject;

use thiserror::Error;

pub use commands::{run_exponent, run_lemma2, run_records, run_series, run_verify_theorem, Outcome};
pub use config::{ExperimentConfig, Parallelism};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;
pub const EXIT_BELOW_THRESHOLD: i32 = 4;
pub const EXIT_PSI_NOT_VALID: i32 = 5;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("node budget exhausted: {0}")]
    Budget(String),
    #[error("psi is not a valid lower bound: {0}")]
    PsiNotValid(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Budget(_) => EXIT_BUDGET,
            CliError::PsiNotValid(_) => EXIT_PSI_NOT_VALID,
            CliError::Io(_) | CliError::Csv(_) => EXIT_IO,
        }
    }

    pub fn message(&self) -> String {
        match self {
            CliError::Config(m) | CliError::Budget(m) | CliError::PsiNotValid(m) => m.clone(),
            other => other.to_string(),
        }
    }
}
