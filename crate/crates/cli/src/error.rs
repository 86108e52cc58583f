use std::io;
use std::path::PathBuf;

use thiserror::Error;

/// Exit status for input problems: missing files, bad flags, stage order.
pub const EXIT_INPUT: i32 = 2;
/// Exit status for data that fails validation.
pub const EXIT_VALIDATION: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("missing input {}: {hint}", path.display())]
    MissingInput { path: PathBuf, hint: String },
    #[error("stage {stage} needs {needs} first ({} missing)", path.display())]
    StageOrder { stage: &'static str, needs: &'static str, path: PathBuf },
    #[error("{} exists and is not up to date; pass --force to overwrite", path.display())]
    Overwrite { path: PathBuf },
    #[error("config: {0}")]
    Config(String),
    #[error("{context}: {source}")]
    Data {
        context: String,
        source: shotmem_core::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Data { .. } => EXIT_VALIDATION,
            _ => EXIT_INPUT,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

/// Attaches a file or stage name to core errors.
pub(crate) trait Context<T> {
    fn context(self, what: impl FnOnce() -> String) -> CliResult<T>;
}

impl<T> Context<T> for shotmem_core::Result<T> {
    fn context(self, what: impl FnOnce() -> String) -> CliResult<T> {
        self.map_err(|source| CliError::Data { context: what(), source })
    }
}
