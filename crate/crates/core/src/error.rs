use std::fmt;
use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// A record that does not follow its file format.
    #[error("{}:{line}: {message}", path.display())]
    Format { path: PathBuf, line: usize, message: String },

    #[error(transparent)]
    Sentence(#[from] SentenceError),

    #[error("{0}")]
    Invalid(String),

    #[error("SPARQL request to {endpoint} failed{}: {message}", status.map(|s| format!(" with HTTP {s}")).unwrap_or_default())]
    Http { endpoint: String, status: Option<u16>, message: String },

    /// Every validation failure found in a configuration, not only the first.
    #[error("invalid configuration:\n  {}", .0.join("\n  "))]
    Config(Vec<String>),

    #[error("stage `{stage}` failed: {message}")]
    Stage { stage: String, message: String },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    pub(crate) fn format(path: impl Into<PathBuf>, line: usize, message: impl Into<String>) -> Self {
        Error::Format { path: path.into(), line, message: message.into() }
    }
}

/// A sentence of a CoNLL-U file that violates the offset or tree invariants.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SentenceError {
    pub doc_id: Option<String>,
    pub sentence_index: Option<usize>,
    /// Line on which the sentence starts.
    pub line: usize,
    pub message: String,
}

impl fmt::Display for SentenceError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "sentence at line {} (doc_id={}, sent_index={}): {}",
            self.line,
            self.doc_id.as_deref().unwrap_or("?"),
            self.sentence_index.map(|i| i.to_string()).unwrap_or_else(|| "?".to_string()),
            self.message
        )
    }
}

impl std::error::Error for SentenceError {}
