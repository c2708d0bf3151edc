//! Batch front-end: dataset generation, surrogate error studies and FE
//! benchmark runs, all reporting to CSV.

pub mod args;
pub mod commands;
pub mod config;

use std::path::{Path, PathBuf};

pub use commands::{run, RunOutcome};
pub use config::{BackendKind, CommandKind, RunConfig, CONFIG_FILE};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NON_CONVERGENCE: i32 = 2;
pub const EXIT_CONFIG: i32 = 3;
pub const EXIT_IO: i32 = 4;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("I/O error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Core(lagp_core::Error),
}

impl CliError {
    pub fn io(path: impl AsRef<Path>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.as_ref().to_path_buf(),
            source,
        }
    }

    pub fn exit_code(&self) -> i32 {
        use lagp_core::Error as E;
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Io { .. } | CliError::Core(E::Io { .. }) => EXIT_IO,
            CliError::Core(E::InvalidArgs(_) | E::UnknownProblem(_) | E::SchemaMismatch(_) | E::InvalidTheta(_)) => {
                EXIT_CONFIG
            }
            CliError::Core(E::EmptyDataset | E::DuplicateInputs(..)) => EXIT_CONFIG,
            CliError::Core(_) => 1,
        }
    }
}

impl From<lagp_core::Error> for CliError {
    fn from(e: lagp_core::Error) -> Self {
        CliError::Core(e)
    }
}
