use std::io;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] freqborn_core::Error),
    #[error("malformed wavefunction file: {0}")]
    Input(String),
    #[error("numerical contract violated: {0}")]
    Contract(String),
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
}

impl CliError {
    /// 2 usage, 3 capacity, 4 numerical-contract violation, 1 anything else.
    pub fn exit_code(&self) -> i32 {
        use freqborn_core::Error as E;
        match self {
            CliError::Usage(_) | CliError::Input(_) => 2,
            CliError::Core(E::Domain(_)) => 2,
            CliError::Core(E::Range { .. } | E::Capacity { .. }) => 3,
            CliError::Core(E::NotNormalized { .. }) | CliError::Contract(_) => 4,
            CliError::Io(_) => 1,
        }
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Input(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
