use thiserror::Error;

/// Byte offset plus 1-based line/column of a source position.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Pos {
    pub offset: usize,
    pub line: usize,
    pub column: usize,
}

impl std::fmt::Display for Pos {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("syntax error at {pos}: {message}")]
    Syntax { pos: Pos, message: String },

    #[error("unbound trace variable `{var}` at {pos}")]
    UnboundVariable { var: String, pos: Pos },

    #[error("trace variable `{var}` bound twice (at {pos})")]
    DuplicateBinding { var: String, pos: Pos },

    #[error("transition system: {0}")]
    SystemParse(String),

    #[error("vertex `{0}` has no outgoing edge")]
    DeadEnd(String),

    #[error("unknown atomic proposition `{0}`")]
    UnknownProposition(String),

    #[error("arity mismatch: expected {expected}, found {found}")]
    ArityMismatch { expected: usize, found: usize },

    #[error("length mismatch: {0}")]
    LengthMismatch(String),

    #[error("unassigned trace variable `{0}`")]
    Unassigned(String),

    #[error("budget exceeded: {what} (limit {limit})")]
    Budget { what: String, limit: usize },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("invalid letter: {0}")]
    InvalidLetter(String),

    #[error("format error: {0}")]
    Format(String),

    #[error("digest mismatch: {0}")]
    Digest(String),

    #[error("unsupported format version {found} (expected {expected})")]
    Version { expected: u32, found: u32 },

    #[error("incomplete: {0}")]
    Incomplete(String),

    #[error("internal error: {0}")]
    Internal(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn budget(what: impl Into<String>, limit: usize) -> Self {
        Error::Budget { what: what.into(), limit }
    }

    pub fn is_budget(&self) -> bool {
        matches!(self, Error::Budget { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
