use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed record at line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("invariant violation in pair {pair_id}: {message}")]
    Invariant { pair_id: String, message: String },
    #[error("unknown pair id {0}")]
    UnknownPair(String),
    #[error("unknown span id {0}")]
    UnknownSpan(String),
    #[error("annotator {provider} failed: {message}")]
    Annotator { provider: String, message: String },
    #[error("backend error: {0}")]
    Backend(String),
    #[error("replay cache miss for key {0}")]
    ReplayMiss(String),
    #[error("service request failed after {attempts} attempts: {message}")]
    Service { attempts: u32, message: String },
    #[error("configuration error: {0}")]
    Config(String),
    #[error("empty input: {0}")]
    Empty(String),
    #[error("score alignment error for pair {pair_id} at token index {index}: {message}")]
    Alignment {
        pair_id: String,
        index: usize,
        message: String,
    },
    #[error("mismatched item sets: {0}")]
    MismatchedItems(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
