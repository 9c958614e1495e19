//! Command-line plumbing for `qmlp`: model files, QASM text, batch runs and
//! the error-to-exit-code mapping.

pub mod model_file;
pub mod qasm;
pub mod report;

use std::path::Path;

use thiserror::Error;

use model_file::ModelFileError;
use qasm::QasmError;

/// Failure of a subcommand, grouped by exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    Parse(String),
    #[error("{0}")]
    Validation(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Io(_) => 3,
            CliError::Parse(_) => 4,
            CliError::Validation(_) => 5,
        }
    }
}

impl From<qmlp::Error> for CliError {
    fn from(e: qmlp::Error) -> Self {
        match e {
            qmlp::Error::Io { .. } => CliError::Io(e.to_string()),
            qmlp::Error::Idx(_) => CliError::Parse(e.to_string()),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

impl From<QasmError> for CliError {
    fn from(e: QasmError) -> Self {
        match e {
            QasmError::DirectInit => CliError::Validation(e.to_string()),
            _ => CliError::Parse(e.to_string()),
        }
    }
}

impl From<ModelFileError> for CliError {
    fn from(e: ModelFileError) -> Self {
        match e {
            ModelFileError::Json(_) => CliError::Parse(e.to_string()),
            ModelFileError::Schema { .. } => CliError::Validation(e.to_string()),
        }
    }
}

pub fn read_text(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

pub fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

pub fn load_model(path: &Path) -> Result<qmlp::QnnModel, CliError> {
    Ok(model_file::parse_model(&read_text(path)?)?)
}
