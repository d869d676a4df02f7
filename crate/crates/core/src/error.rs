use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Two operands live in different ambient groups.
    #[error("index sets differ: {left} vs {right}")]
    ContextMismatch { left: String, right: String },

    /// An argument is outside the domain of the operation (empty set, bad label set, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// A numeric parameter is out of its admissible range.
    #[error("{name} = {value} out of range ({range})")]
    OutOfRange {
        name: &'static str,
        value: String,
        range: String,
    },

    /// The ambient dimension is too large for the requested computation.
    #[error("dimension {dim} exceeds the limit {limit} for {what}")]
    DimensionTooLarge {
        dim: usize,
        limit: usize,
        what: &'static str,
    },

    /// A precondition on the inputs (other than range) does not hold.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// A proved statement failed on a concrete instance. This always indicates a bug.
    #[error("contradiction: {0}")]
    Contradiction(String),

    /// Malformed set file or other textual input.
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn out_of_range(
        name: &'static str,
        value: impl ToString,
        range: impl ToString,
    ) -> Self {
        Error::OutOfRange {
            name,
            value: value.to_string(),
            range: range.to_string(),
        }
    }
}
