use std::process::ExitCode;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("scenario error: {0}")]
    Schema(String),

    #[error("unknown preset {name:?}; valid presets: {}", valid.join(", "))]
    UnknownPreset { name: String, valid: Vec<&'static str> },

    #[error("{0}")]
    Io(String),
}

impl CliError {
    /// Prefixes a schema error with where it happened.
    pub fn within(self, context: &str) -> Self {
        match self {
            Self::Schema(msg) => Self::Schema(format!("{context}: {msg}")),
            other => other,
        }
    }

    pub fn exit_code(&self) -> ExitCode {
        match self {
            Self::Schema(_) | Self::UnknownPreset { .. } => ExitCode::from(2),
            Self::Io(_) => ExitCode::from(1),
        }
    }
}
