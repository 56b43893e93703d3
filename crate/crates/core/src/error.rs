use thiserror::Error;

/// Errors produced while loading, parsing or running the tagger.
#[derive(Debug, Error)]
pub enum Error {
    /// Malformed input at a 1-based line.
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    /// Malformed input at a 1-based line and column (characters).
    #[error("line {line}, column {column}: {message}")]
    ParseAt {
        line: usize,
        column: usize,
        message: String,
    },

    /// Malformed bilingual record (1-based record index).
    #[error("record {record}: {message}")]
    Record { record: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("cannot train a model on an empty corpus")]
    EmptyCorpus,

    /// Predicted and gold sides of an evaluation pair spell different text.
    #[error("sentence {index}: predicted and gold character sequences differ")]
    TextMismatch { index: usize },

    /// Exhaustive decoding refused: too many tag assignments.
    #[error("search space of {size} assignments exceeds the cap of {cap}")]
    SearchSpaceTooLarge { size: u128, cap: u128 },

    /// A value violates a construction invariant.
    #[error("{0}")]
    Invalid(String),
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }

    pub(crate) fn parse_at(line: usize, column: usize, message: impl Into<String>) -> Self {
        Error::ParseAt {
            line,
            column,
            message: message.into(),
        }
    }

    pub(crate) fn invalid(message: impl Into<String>) -> Self {
        Error::Invalid(message.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
