//! Batch front-end: reads an [`ExperimentConfig`], runs it and renders a
//! CSV whose header records the software version, a SHA-256 hash of the
//! effective configuration and the master seed.
//!
//! Identical configurations produce byte-identical CSV regardless of the
//! worker count.

mod config;
mod run;

pub use config::{CheckKind, Command, EstimatorConfig, ExperimentConfig, Grids, MethodKind, VerifyConfig};
pub use run::{config_hash, run, Outcome};

/// Exit status for success.
pub const EXIT_OK: i32 = 0;
/// Exit status when a computation fails at run time.
pub const EXIT_FAILURE: i32 = 1;
/// Exit status for an unreadable or invalid configuration.
pub const EXIT_INVALID_CONFIG: i32 = 2;
/// Exit status when a verification produced a confirmed flag.
pub const EXIT_CONFIRMED_FLAG: i32 = 3;

/// Environment variable holding the default worker count.
pub const WORKERS_ENV: &str = "IBM_EXIT_WORKERS";

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("config line {line}, column {column}, at `{field}`: {message}")]
    Parse { line: usize, column: usize, field: String, message: String },
    #[error("config field `{field}`: {message}")]
    Invalid { field: String, message: String },
}
