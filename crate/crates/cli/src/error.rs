use serde::Serialize;

pub type Result<T, E = CliError> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("{file}: {message}")]
    Config {
        file: String,
        /// Dotted path of the offending field, when known.
        field: Option<String>,
        line: Option<usize>,
        column: Option<usize>,
        message: String,
    },
    #[error(transparent)]
    Model(#[from] crn_core::Error),
    #[error("malformed table: {0}")]
    Table(String),
}

/// Shape of the JSON error record written to stderr.
#[derive(Debug, Serialize)]
pub struct ErrorRecord {
    pub error: &'static str,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub file: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub field: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub line: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub column: Option<usize>,
}

impl CliError {
    pub fn io(path: impl std::fmt::Display, err: std::io::Error) -> Self {
        CliError::Io {
            path: path.to_string(),
            message: err.to_string(),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Io { .. } => "io",
            CliError::Config { .. } => "config",
            CliError::Model(_) => "model",
            CliError::Table(_) => "table",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }

    pub fn record(&self) -> ErrorRecord {
        let mut rec = ErrorRecord {
            error: self.kind(),
            message: self.to_string(),
            file: None,
            field: None,
            line: None,
            column: None,
        };
        match self {
            CliError::Io { path, message } => {
                rec.file = Some(path.clone());
                rec.message = message.clone();
            }
            CliError::Config {
                file,
                field,
                line,
                column,
                message,
            } => {
                rec.file = Some(file.clone());
                rec.field = field.clone();
                rec.line = *line;
                rec.column = *column;
                rec.message = message.clone();
            }
            _ => {}
        }
        rec
    }

    pub fn record_json(&self) -> String {
        serde_json::to_string(&self.record()).expect("error record serializes")
    }
}
