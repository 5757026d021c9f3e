use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by the model layers (environment, listeners, speaker).
#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("invalid environment config: {0}")]
    InvalidConfig(String),

    #[error("hypothesis grid too large: {count} exceeds cap {cap}")]
    TooLarge { count: u128, cap: u64 },

    #[error("dimension mismatch: features have length {features}, weights have length {weights}")]
    DimensionMismatch { features: usize, weights: usize },

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("invalid utterance: {0}")]
    InvalidUtterance(String),

    #[error("evidence is inconsistent with every hypothesis in the prior")]
    InconsistentEvidence,

    #[error("posterior has zero total mass")]
    DegeneratePosterior,

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("no policy supplied for state {0}")]
    IncompletePolicy(usize),
}

/// Errors surfaced by the experiment harness and CLI.
#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config validation failed: {0}")]
    Config(String),

    #[error(transparent)]
    Model(#[from] ModelError),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl HarnessError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        HarnessError::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code for this error: 2 for config validation, 3 for I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config(_) => 2,
            HarnessError::Model(ModelError::InvalidConfig(_) | ModelError::TooLarge { .. }) => 2,
            HarnessError::Io { .. } => 3,
            HarnessError::Model(_) => 1,
        }
    }
}
