use std::path::PathBuf;

use thiserror::Error;

/// A line-oriented input that could not be parsed.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}: {text:?}")]
pub struct ParseError {
    /// 1-based line number.
    pub line: usize,
    /// The offending line, without its terminator.
    pub text: String,
    pub message: String,
}

#[derive(Debug, Error)]
pub enum GraphError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("no entity labelled {0:?}")]
    EntityNotFound(String),
}

#[derive(Debug, Error)]
pub enum RuleError {
    #[error(transparent)]
    Syntax(#[from] ParseError),
    #[error("line {line}: rule {rule}: head variable ?{variable} does not occur in the body")]
    Unsafe {
        line: usize,
        rule: String,
        variable: String,
    },
    #[error("fixpoint not reached after {0} iterations")]
    Divergence(usize),
}

#[derive(Debug, Error)]
pub enum IndexError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{file}: {message}")]
    Format { file: PathBuf, message: String },
    #[error("{file}: unsupported format version {found} (expected {expected})")]
    Version {
        file: PathBuf,
        found: u64,
        expected: u64,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QueryError {
    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("empty query")]
    Empty,
    #[error("unknown field {name:?} at offset {offset} (expected d, e, at, v or *)")]
    UnknownField { offset: usize, name: String },
    #[error("{0}")]
    Argument(String),
}

impl QueryError {
    /// Character offset the error points at, if it has one.
    pub fn offset(&self) -> Option<usize> {
        match self {
            QueryError::Syntax { offset, .. } | QueryError::UnknownField { offset, .. } => {
                Some(*offset)
            }
            _ => None,
        }
    }
}

#[derive(Debug, Error)]
pub enum EvalError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("query {0:?} has no relevance judgments")]
    UnknownQuery(String),
}
