use std::fmt;

/// Validation failure pinned to a configuration field.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub field: String,
    pub message: String,
}

impl ConfigError {
    pub fn new(field: impl Into<String>, message: impl Into<String>) -> Self {
        Self { field: field.into(), message: message.into() }
    }

    pub(crate) fn from_core(prefix: &str, e: isolator_core::Error) -> Self {
        match e {
            isolator_core::Error::InvalidParameter { field, reason } => Self::new(format!("{prefix}.{field}"), reason),
            other => Self::new(prefix, other.to_string()),
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("invalid configuration: {0}")]
    Config(#[from] ConfigError),
    #[error("model error at {context}: {source}")]
    Model {
        context: String,
        #[source]
        source: isolator_core::Error,
    },
    #[error("conservation check failed at {context}: {detail}")]
    Conservation { context: String, detail: String },
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{failed} self-check(s) failed")]
    SelfCheck { failed: usize },
}

impl RunError {
    pub fn model(context: impl Into<String>, source: isolator_core::Error) -> Self {
        Self::Model { context: context.into(), source }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => 1,
            RunError::Model { .. } | RunError::Conservation { .. } | RunError::Io { .. } => 2,
            RunError::SelfCheck { .. } => 3,
        }
    }
}
