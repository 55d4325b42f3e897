use thiserror::Error;

/// Errors raised by the group, series and formula layers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown component kind `{0}`")]
    UnknownComponent(String),
    #[error("invalid component: {0}")]
    InvalidComponent(String),
    #[error("element does not fit the group: {0}")]
    Shape(String),
    #[error("operation needs element arithmetic, but component {0} is schematic")]
    NonEffective(usize),
    #[error("series over different groups")]
    GroupMismatch,
    #[error("zero series has no {0}")]
    ZeroSeries(&'static str),
    #[error("truncated series has no known leading term")]
    UnknownLeadingTerm,
    #[error("precision exhausted: {0}")]
    Precision(String),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("no {p}-th root exists")]
    NoRoot { p: u64 },
    #[error("leading coefficient {0} is not an exact rational power; use the enclosure mode")]
    InexactRoot(String),
    #[error("invalid cut: {0}")]
    InvalidCut(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("unbound variable `{0}`")]
    UnboundVariable(String),
    #[error("unsupported quantifier pattern: {0}")]
    UnsupportedQuantifierPattern(String),
    #[error("wrong parameter count: expected {expected}, got {got}")]
    ParamCount { expected: usize, got: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
