use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    /// Malformed or inadmissible configuration; `line` is 1-based.
    #[error("{}", config_message(*.line, .message))]
    Config { line: Option<usize>, message: String },

    #[error(transparent)]
    Core(#[from] anslab_core::Error),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("{0}")]
    Other(String),
}

fn config_message(line: Option<usize>, message: &str) -> String {
    match line {
        Some(l) => format!("config error at line {l}: {message}"),
        None => format!("config error: {message}"),
    }
}

impl HarnessError {
    pub fn config(line: Option<usize>, message: impl Into<String>) -> Self {
        HarnessError::Config {
            line,
            message: message.into(),
        }
    }

    pub fn is_config(&self) -> bool {
        matches!(self, HarnessError::Config { .. })
    }
}

pub type Result<T, E = HarnessError> = std::result::Result<T, E>;
