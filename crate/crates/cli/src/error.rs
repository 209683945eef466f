use thiserror::Error;

/// Everything that ends a run early. [`CliError::exit_code`] maps each
/// kind to the process status.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("config line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid `{field}`: {constraint}")]
    Validation { field: String, constraint: String },

    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Numerical(lineshape_core::Error),

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

pub const EXIT_CHECKS_FAILED: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

impl CliError {
    pub fn validation(field: &str, constraint: &str) -> Self {
        CliError::Validation {
            field: field.to_string(),
            constraint: constraint.to_string(),
        }
    }

    /// Parameter errors are configuration errors; the rest are numerical.
    pub fn from_core(e: lineshape_core::Error) -> Self {
        match e {
            lineshape_core::Error::InvalidParameter { field, constraint } => CliError::Validation {
                field: field.to_string(),
                constraint,
            },
            other => CliError::Numerical(other),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse { .. } | CliError::Validation { .. } | CliError::Usage(_) | CliError::Io { .. } => {
                EXIT_CONFIG
            }
            CliError::Numerical(_) => EXIT_NUMERICAL,
        }
    }
}
