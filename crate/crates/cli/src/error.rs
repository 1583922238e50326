//! Document-level errors. Errors raised while running a single check are
//! recorded in the report instead.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DslError {
    #[error("line {line}, column {col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("line {line}, column {col}: {source}")]
    Coefficient {
        line: usize,
        col: usize,
        #[source]
        source: cpair_core::Error,
    },
    #[error("line {line}: unknown name {name}")]
    UnknownName { line: usize, name: String },
    #[error("line {line}: {msg}")]
    Semantic { line: usize, msg: String },
}

impl DslError {
    pub fn syntax(line: usize, col: usize, msg: impl Into<String>) -> Self {
        DslError::Syntax { line, col, msg: msg.into() }
    }

    pub fn semantic(line: usize, msg: impl Into<String>) -> Self {
        DslError::Semantic { line, msg: msg.into() }
    }

    pub fn line(&self) -> usize {
        match self {
            DslError::Syntax { line, .. }
            | DslError::Coefficient { line, .. }
            | DslError::UnknownName { line, .. }
            | DslError::Semantic { line, .. } => *line,
        }
    }
}
