use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    /// A checked inequality failed (e.g. a bound violation).
    #[error("assertion failed: {0}")]
    Assertion(String),
    #[error(transparent)]
    Solver(#[from] wos_core::Error),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    /// 0 success, 1 runtime failure, 2 config error, 3 assertion.
    pub fn exit_code(&self) -> i32 {
        use wos_core::Error as E;
        match self {
            CliError::Config(_) => 2,
            CliError::Assertion(_) => 3,
            CliError::Solver(E::InvalidInput(_) | E::DimensionMismatch { .. } | E::Unsupported(_) | E::Parse(_)) => 2,
            CliError::Solver(_) | CliError::Io(_) => 1,
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
