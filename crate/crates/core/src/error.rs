use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("undeclared generator `{symbol}` at line {line}, column {column}")]
    UndeclaredGenerator {
        symbol: String,
        line: usize,
        column: usize,
    },
    #[error("trivial relator at line {line}: word freely reduces to the identity")]
    TrivialRelator { line: usize },
    #[error("orientation character is -1 on relator `{relator}`")]
    OrientationOnRelator { relator: String },
    #[error("orientation character not given for generator `{0}`")]
    MissingOrientation(String),
    #[error("rewriting exceeded the step budget of {0} steps")]
    StepBudget(usize),
    #[error("rewriting system is not confluent: {0}")]
    NotConfluent(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("internal consistency failure: {0}")]
    Inconsistent(String),
    #[error("no dual-module reducer implemented for {0}")]
    NoReducer(String),
    #[error("truncation too small: {0}")]
    TruncationTooSmall(String),
    #[error("value escapes truncation window: {0}")]
    TruncationEscape(String),
    #[error("element belongs to a different context: {0}")]
    WrongContext(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("malformed input: {0}")]
    Malformed(String),
}
