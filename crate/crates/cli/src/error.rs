use std::fmt;

/// Command-line failure buckets, each with a fixed exit code: usage errors
/// exit 1, data errors 2, resource/configuration limits 3.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Data(String),
    Resource(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
            CliError::Resource(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Data(m) | CliError::Resource(m) => f.write_str(m),
        }
    }
}

impl From<gsig::Error> for CliError {
    fn from(e: gsig::Error) -> Self {
        use gsig::Error::*;
        let message = e.to_string();
        match e {
            InvalidBand { .. } | InvalidAlpha(_) | InvalidProbability(_) | UnsupportedKind(_)
            | SigmaOutsideBand { .. } | InvalidConfig(_) => CliError::Usage(message),
            InsufficientData { .. } | InvalidBlockLength { .. } | InvalidSubsampleCount { .. } => {
                CliError::Data(message)
            }
            HorizonTooLarge { .. } | UnstableGrid { .. } | InvalidGrid(_) => {
                CliError::Resource(message)
            }
        }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Data(format!("serialization failed: {e}"))
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
