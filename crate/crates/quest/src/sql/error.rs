//! Error type for lexing and parsing.

use thiserror::Error;

use super::token::Position;

#[derive(Debug, Error)]
pub enum SqlError {
    /// The input contains characters or literals the lexer cannot tokenize.
    #[error("lex error at {position}: {message}")]
    Lex { position: Position, message: String },

    /// The token stream violates the subset grammar.
    #[error("parse error at {position}: expected {}, found {found}", expected.join(" or "))]
    Parse { position: Position, expected: Vec<String>, found: String },

    /// Recognized SQL outside the supported subset (UNION, window
    /// functions, CTEs, outer joins, non-SELECT statements, ...).
    #[error("unsupported feature at {position}: {feature}")]
    Unsupported { feature: String, position: Position },
}

impl SqlError {
    pub fn position(&self) -> Position {
        match self {
            SqlError::Lex { position, .. }
            | SqlError::Parse { position, .. }
            | SqlError::Unsupported { position, .. } => *position,
        }
    }

    /// The unsupported feature name, when this error is that kind.
    pub fn unsupported_feature(&self) -> Option<&str> {
        match self {
            SqlError::Unsupported { feature, .. } => Some(feature),
            _ => None,
        }
    }
}
