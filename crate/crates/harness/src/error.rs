use thiserror::Error;

pub type Result<T> = std::result::Result<T, HarnessError>;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("{}`{key}`: {reason}", if *line > 0 { format!("line {line}: ") } else { String::new() })]
    Config { line: usize, key: String, reason: String },

    #[error(transparent)]
    Core(#[from] fdcran_core::Error),

    #[error("I/O error on {path}: {source}")]
    Io { path: String, source: std::io::Error },

    #[error("malformed results file: {0}")]
    Format(String),
}

impl HarnessError {
    pub(crate) fn at_line(self, line: usize) -> Self {
        match self {
            HarnessError::Config { key, reason, .. } => HarnessError::Config { line, key, reason },
            other => other,
        }
    }

    pub fn io(path: &std::path::Path, source: std::io::Error) -> Self {
        HarnessError::Io { path: path.display().to_string(), source }
    }
}
