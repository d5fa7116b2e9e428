use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(String),

    #[error("{0}")]
    Engine(tdqec::Error),

    #[error("verification failed: {0}")]
    Verification(String),

    #[error("files in {dir} not registered by any manifest: {files:?}")]
    Orphans { dir: PathBuf, files: Vec<String> },

    #[error("{context}: {source}")]
    Io { context: String, source: std::io::Error },
}

impl CliError {
    /// 0 success, 1 usage or config, 2 engine guard, 3 verification failure.
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Config(_) | Self::Orphans { .. } | Self::Io { .. } => 1,
            Self::Engine(_) => 2,
            Self::Verification(_) => 3,
        }
    }

    pub fn io(context: impl Into<String>) -> impl FnOnce(std::io::Error) -> Self {
        let context = context.into();
        move |source| Self::Io { context, source }
    }
}

impl From<tdqec::Error> for CliError {
    /// Bad inputs caught by the library count as configuration errors;
    /// everything raised while running counts as an engine guard.
    fn from(e: tdqec::Error) -> Self {
        use tdqec::Error as E;
        match e {
            E::InvalidCodeSize(_)
            | E::TruncationOutOfRange { .. }
            | E::InvalidIonParams(_)
            | E::InvalidTones(_)
            | E::InvalidConfig(_)
            | E::SyndromeLength { .. }
            | E::DimensionMismatch { .. } => Self::Config(e.to_string()),
            other => Self::Engine(other),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_follow_the_contract() {
        assert_eq!(CliError::from(tdqec::Error::InvalidCodeSize(4)).exit_code(), 1);
        assert_eq!(CliError::from(tdqec::Error::TimeStepGuard(0.3)).exit_code(), 2);
        assert_eq!(CliError::from(tdqec::Error::DimensionGuard { max: 7, requested: 9 }).exit_code(), 2);
        assert_eq!(CliError::Verification("kl".into()).exit_code(), 3);
        assert_eq!(CliError::Orphans { dir: "x".into(), files: vec![] }.exit_code(), 1);
    }
}
