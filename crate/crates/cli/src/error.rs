use cavity_synth::Error;
use thiserror::Error as ThisError;

#[derive(Debug, ThisError)]
pub enum CliError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("{0}")]
    Domain(Error),
    #[error("{0}{hint}", hint = unreachable_hint(.0))]
    Unreachable(Error),
    #[error("{0}")]
    Io(String),
}

fn unreachable_hint(e: &Error) -> &'static str {
    match e {
        Error::PhaseUnreachable { .. } => " (pass --allow-idle to permit idle steps)",
        _ => "",
    }
}

impl CliError {
    pub fn from_core(e: Error) -> Self {
        match e {
            Error::Document(_) | Error::InvalidTarget(_) => CliError::Parse(e.to_string()),
            Error::PhaseUnreachable { .. } | Error::NotConverged { .. } => CliError::Unreachable(e),
            other => CliError::Domain(other),
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Io(_) => 1,
            CliError::Parse(_) => 2,
            CliError::Domain(_) => 3,
            CliError::Unreachable(_) => 4,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        Self::from_core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
