//! Exit codes and their mapping from library errors.

use wmink::Error;

pub const OK: u8 = 0;
pub const FAILURE: u8 = 1;
pub const SCHEMA: u8 = 2;
pub const NOT_CONVERGED: u8 = 3;
pub const HYPERPLANE: u8 = 4;
pub const INADMISSIBLE: u8 = 5;

#[derive(Debug, Clone, PartialEq)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn new(code: u8, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }

    pub fn schema(message: impl Into<String>) -> Self {
        Self::new(SCHEMA, message)
    }

    pub fn io(message: impl Into<String>) -> Self {
        Self::new(FAILURE, message)
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::InvalidInput(_) | Error::InvalidWeight(_) => SCHEMA,
            Error::ConcentratedOnHyperplane { .. } => HYPERPLANE,
            Error::NotConverged { .. } | Error::CollapsedBody { .. } => NOT_CONVERGED,
            _ => FAILURE,
        };
        Self::new(code, e.to_string())
    }
}
