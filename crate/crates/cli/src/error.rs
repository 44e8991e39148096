use thiserror::Error;

use crate::expr::ParseError;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{field}: {error}")]
    Parse { field: String, error: ParseError },

    #[error("invalid map document: {0}")]
    Document(String),

    #[error("{0}")]
    Validation(String),

    #[error("unknown example '{0}'; run `qasdyn examples` for the list")]
    UnknownExample(String),

    #[error("{0}")]
    Io(String),
}

impl CliError {
    /// Every input, document or I/O failure exits with 2.
    pub fn exit_code(&self) -> i32 {
        2
    }
}
