use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("evaluation {value} is outside [-{max}, {max}]")]
    EvalOutOfRange { value: i64, max: i64 },

    #[error("value {value} is outside [-{max}, {max}]")]
    ValueOutOfRange { value: i64, max: i64 },

    #[error("invalid window: alpha ({alpha}) must be strictly less than beta ({beta})")]
    InvalidWindow { alpha: i64, beta: i64 },

    #[error("tree is not turn-based: a child has the same color as its parent")]
    NotTurnBased,

    #[error("tree height {height} exceeds the supported search height {limit}")]
    TooDeep { height: usize, limit: usize },

    #[error("child count {index} is outside 1..={len}")]
    ChildIndex { index: usize, len: usize },

    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("invalid tree at {path}: {message}")]
    Format { path: String, message: String },

    #[error("invalid generator config: {0}")]
    Config(String),

    #[error(transparent)]
    GuardExceeded(#[from] crate::witness::GuardExceeded),

    #[error("contract violated: {0}")]
    Contract(String),

    #[error("unknown algorithm `{0}`")]
    UnknownAlgorithm(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
