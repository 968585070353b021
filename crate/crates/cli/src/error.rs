use thiserror::Error;

/// Failures surfaced by the command-line tool, each tied to an exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("{0}; the cut-tail point is defined only for Hurwitz matrices (every eigenvalue in the open left half-plane)")]
    NotHurwitz(String),
    #[error("numeric failure: {0}")]
    Numeric(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    /// 2 is reserved for non-Hurwitz input; every other failure exits with 1.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::NotHurwitz(_) => 2,
            _ => 1,
        }
    }
}

impl From<cuttail::Error> for CliError {
    fn from(e: cuttail::Error) -> Self {
        match e {
            cuttail::Error::NotHurwitz { .. } => CliError::NotHurwitz(e.to_string()),
            cuttail::Error::InvalidInput(msg) => CliError::Usage(msg),
            other => CliError::Numeric(other.to_string()),
        }
    }
}
