use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unsupported space H({n},{q}): {reason}")]
    Space { n: usize, q: usize, reason: String },

    #[error("words belong to different spaces: H({0},{1}) vs H({2},{3})")]
    SpaceMismatch(usize, usize, usize, usize),

    #[error("symbol {symbol} at coordinate {coord} is out of range for q={q}")]
    Symbol { coord: usize, symbol: usize, q: usize },

    #[error("rank {rank} is outside a space of size {size}")]
    Rank { rank: u64, size: u64 },

    #[error("code has {0} members, at least 2 are required")]
    TooFewWords(usize),

    #[error("empty code")]
    EmptyCode,

    #[error("{0} is not a supported field order")]
    Field(usize),

    #[error("no full-weight codewords to retract")]
    NoFullWeight,

    #[error("infeasible parameters: {0}")]
    Infeasible(String),

    #[error("duplicate word {0} generated")]
    Duplicate(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("budget exceeded: {0}")]
    Budget(String),

    #[error("checkpoint error: {0}")]
    Checkpoint(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}
