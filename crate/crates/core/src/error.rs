use thiserror::Error;

/// What went wrong while reading an expression.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("unexpected character {0:?}")]
    Lexical(char),
    #[error("unknown identifier {0}")]
    UnknownIdentifier(String),
    #[error("{0} takes exactly one argument")]
    Arity(String),
    #[error("exponent must be an integer")]
    NonIntegerExponent,
    #[error("expected {expected}, found {found}")]
    Unexpected { expected: String, found: String },
}

/// Position-annotated parse failure; `offset` is a byte offset into the source.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{kind} at offset {offset}")]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub offset: usize,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error in {context}: {source}")]
    Parse {
        context: String,
        #[source]
        source: ParseError,
    },
    #[error("invalid metric document: {0}")]
    Schema(String),
    #[error("metric entries g[{i}][{j}] and g[{j}][{i}] differ")]
    Asymmetric { i: usize, j: usize },
    #[error("dimension {0} outside the supported range 3..=8")]
    Dimension(usize),
    #[error("domain error at offset {offset}: {message}")]
    Domain { offset: usize, message: String },
    #[error("metric is not positive definite at the evaluation point")]
    NotPositiveDefinite,
    #[error("non-finite value in metric derivatives")]
    NonFinite,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("linear map is rank deficient: rank {rank}, expected {expected}")]
    RankDeficient { rank: usize, expected: usize },
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
