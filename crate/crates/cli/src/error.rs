use std::fmt;
use std::path::Path;

/// Failure classes with their process exit codes.
#[derive(Debug)]
pub enum CliError {
    /// Bad flags or flag combinations (exit 2).
    Usage(String),
    /// Input that cannot be read or does not meet the data contract (exit 3).
    Data(String),
    /// Floating-point breakdown or an undefined theoretical quantity (exit 4).
    Numeric(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Data(_) => 3,
            CliError::Numeric(_) => 4,
        }
    }

    pub fn io(path: &Path, err: impl fmt::Display) -> Self {
        CliError::Data(format!("{}: {err}", path.display()))
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage: {m}"),
            CliError::Data(m) => write!(f, "data: {m}"),
            CliError::Numeric(m) => write!(f, "numeric: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<l1logit::Error> for CliError {
    fn from(e: l1logit::Error) -> Self {
        use l1logit::Error as E;
        let msg = e.to_string();
        match e {
            E::Parameter { .. } => CliError::Usage(msg),
            E::GridTooLow { .. } | E::UndefinedBound(_) => CliError::Numeric(msg),
            _ if e.is_numeric() => CliError::Numeric(msg),
            _ => CliError::Data(msg),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
