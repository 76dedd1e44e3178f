use std::io;
use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },

    #[error("malformed header: {0}")]
    Header(String),

    /// A text-format row could not be parsed. `line` is 1-based.
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("truncated file while reading entry {index}{}", token.as_ref().map(|t| format!(" (`{t}`)")).unwrap_or_default())]
    Truncated { index: usize, token: Option<String> },

    #[error("vocabulary count mismatch: header declares {declared}, file holds {found}")]
    VocabMismatch { declared: usize, found: usize },

    #[error("duplicate token `{0}`")]
    DuplicateToken(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("duplicate class id `{0}`")]
    DuplicateClass(String),

    #[error("unknown class id `{0}`")]
    UnknownClass(String),

    #[error("cycle in class parent links: {}", .0.join(" -> "))]
    ClassCycle(Vec<String>),

    #[error("invalid ontology: {0}")]
    Ontology(String),

    #[error("synset `{synset}` references missing hypernym `{hypernym}`")]
    DanglingHypernym { synset: String, hypernym: String },

    #[error("cycle in hypernym links: {}", .0.join(" -> "))]
    TaxonomyCycle(Vec<String>),

    #[error("unknown synset `{0}`")]
    UnknownSynset(String),

    #[error("invalid taxonomy: {0}")]
    Taxonomy(String),

    #[error("every seed of class `{0}` is out of vocabulary")]
    NoSeedVectors(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for errors caused by user input or configuration rather than
    /// a failure while computing.
    pub fn is_usage(&self) -> bool {
        matches!(self, Error::Config(_) | Error::InvalidArgument(_))
            || matches!(self, Error::Io { source, .. } if source.kind() == io::ErrorKind::NotFound)
    }
}
