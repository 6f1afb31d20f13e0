//! Library surface of the batch front end; `main.rs` is a thin wrapper so the
//! commands stay testable.

pub mod config;
pub mod dispatch;
pub mod population;
pub mod report;

use std::path::PathBuf;

use thiserror::Error;

/// Front-end errors, mapped onto process exit codes:
/// 0 success, 2 config error, 3 numerical failure, 4 partial failure.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Serialize(#[from] serde_json::Error),

    #[error(transparent)]
    Core(#[from] gsa_core::Error),
}

/// Resolves the output directory: CLI flag, then config, then the
/// `GSA_OUT_DIR` environment variable, then `./gsa_out`.
pub fn resolve_out_dir(flag: Option<PathBuf>, from_config: Option<PathBuf>) -> PathBuf {
    flag.or(from_config)
        .or_else(|| std::env::var_os("GSA_OUT_DIR").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("gsa_out"))
}
