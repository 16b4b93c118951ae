use std::fmt;

/// Line/column of a token in source text (both 1-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("syntax error at {pos}: {msg}")]
    Syntax { pos: Pos, msg: String },

    #[error("unknown symbol `{name}` at {pos}")]
    UnknownSymbol { name: String, pos: Pos },

    #[error("arity mismatch for `{symbol}` at {pos}: expected {expected}, found {found}")]
    ArityMismatch {
        symbol: String,
        expected: usize,
        found: usize,
        pos: Pos,
    },

    #[error("variable v{index} at {pos} is outside the bound of {bound} variables")]
    VariableOutOfRange { index: usize, bound: usize, pos: Pos },

    #[error("invalid language: {0}")]
    InvalidLanguage(String),

    #[error("variable budget exceeded: need {needed} variables, language has {available}")]
    VariableBudget { needed: usize, available: usize },

    #[error("cap exceeded: {0}")]
    CapExceeded(String),

    #[error("language mismatch: {0}")]
    LanguageMismatch(String),

    #[error("not a sentential language: {0}")]
    NotSentential(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("catalog error at {pos}: {msg}")]
    Catalog { pos: Pos, msg: String },

    #[error("unresolved reference: {0}")]
    Dangling(String),

    #[error("unknown node `{0}`")]
    UnknownNode(String),

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn syntax(pos: Pos, msg: impl Into<String>) -> Self {
        Error::Syntax {
            pos,
            msg: msg.into(),
        }
    }

    /// Whether the error came from a size/complexity cap rather than bad input.
    pub fn is_cap(&self) -> bool {
        matches!(self, Error::CapExceeded(_) | Error::VariableBudget { .. })
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
