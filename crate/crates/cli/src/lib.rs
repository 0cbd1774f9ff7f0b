//! Command-line driver: layered configs, bundled presets, and deterministic
//! CSV/JSON artifacts with a manifest.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod config;
pub mod presets;
pub mod run;

pub use cli::run_cli;
pub use config::{ExperimentConfig, Mode, SystemKind};
pub use presets::{preset, presets, Preset};
pub use run::{execute, run, write_artifacts, Artifact};

pub const TOOL_NAME: &str = "cahm";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: field `{field}`: {message}")]
    Config { field: String, message: String },
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn config(field: &str, message: impl Into<String>) -> Self {
        CliError::Config {
            field: field.to_string(),
            message: message.into(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config { .. } => 2,
            CliError::Numerical(_) => 3,
            CliError::Io(_) => 1,
        }
    }
}

impl From<cahm_core::Error> for CliError {
    fn from(e: cahm_core::Error) -> Self {
        match e {
            cahm_core::Error::InvalidParameter { name, reason } => CliError::config(name, reason),
            other => CliError::Numerical(other.to_string()),
        }
    }
}
