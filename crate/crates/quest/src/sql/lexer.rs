//! Lexer for the supported SQL subset.
//!
//! Tokens carry verbatim input slices and positions, so the token stream
//! plus the skipped whitespace reproduces the input exactly.

use super::error::SqlError;
use super::token::{is_keyword_word, Position, Token, TokenKind};

struct Cursor<'a> {
    text: &'a str,
    chars: std::str::CharIndices<'a>,
    peeked: Option<(usize, char)>,
    line: u32,
    column: u32,
}

impl<'a> Cursor<'a> {
    fn new(text: &'a str) -> Cursor<'a> {
        Cursor { text, chars: text.char_indices(), peeked: None, line: 1, column: 1 }
    }

    fn peek(&mut self) -> Option<(usize, char)> {
        if self.peeked.is_none() {
            self.peeked = self.chars.next();
        }
        self.peeked
    }

    fn bump(&mut self) -> Option<(usize, char)> {
        let next = self.peek();
        self.peeked = None;
        if let Some((_, ch)) = next {
            if ch == '\n' {
                self.line += 1;
                self.column = 1;
            } else {
                self.column += 1;
            }
        }
        next
    }

    fn position(&mut self) -> Position {
        let offset = self.peek().map(|(i, _)| i).unwrap_or(self.text.len());
        Position { offset, line: self.line, column: self.column }
    }
}

/// Lex `text` into tokens. Every error carries a position within the input.
pub fn tokenize(text: &str) -> Result<Vec<Token>, SqlError> {
    let mut cursor = Cursor::new(text);
    let mut tokens = Vec::new();

    loop {
        while matches!(cursor.peek(), Some((_, ch)) if ch.is_whitespace()) {
            cursor.bump();
        }
        let start = cursor.position();
        let Some((offset, ch)) = cursor.peek() else { break };

        if ch == '\'' {
            cursor.bump();
            let mut terminated = false;
            loop {
                match cursor.bump() {
                    None => break,
                    Some((_, '\'')) => {
                        // A doubled quote is an escaped quote inside the literal.
                        if matches!(cursor.peek(), Some((_, '\''))) {
                            cursor.bump();
                        } else {
                            terminated = true;
                            break;
                        }
                    }
                    Some(_) => {}
                }
            }
            if !terminated {
                return Err(SqlError::Lex {
                    position: start,
                    message: "unterminated string literal".to_string(),
                });
            }
            let end = cursor.position().offset;
            tokens.push(Token {
                kind: TokenKind::StringLiteral,
                text: text[offset..end].to_string(),
                position: start,
            });
            continue;
        }

        if ch.is_ascii_digit() {
            cursor.bump();
            while matches!(cursor.peek(), Some((_, c)) if c.is_ascii_digit()) {
                cursor.bump();
            }
            if matches!(cursor.peek(), Some((_, '.'))) {
                // Consume a fractional part only when digits follow the dot;
                // otherwise the dot is punctuation. peek() has buffered the
                // dot, so the backing iterator's next char is the one after it.
                let digit_after_dot =
                    cursor.chars.clone().next().is_some_and(|(_, c)| c.is_ascii_digit());
                if digit_after_dot {
                    cursor.bump();
                    while matches!(cursor.peek(), Some((_, c)) if c.is_ascii_digit()) {
                        cursor.bump();
                    }
                }
            }
            let end = cursor.position().offset;
            tokens.push(Token {
                kind: TokenKind::NumericLiteral,
                text: text[offset..end].to_string(),
                position: start,
            });
            continue;
        }

        if ch.is_alphabetic() || ch == '_' {
            cursor.bump();
            while matches!(cursor.peek(), Some((_, c)) if c.is_alphanumeric() || c == '_') {
                cursor.bump();
            }
            let end = cursor.position().offset;
            let word = &text[offset..end];
            let kind = if is_keyword_word(word) { TokenKind::Keyword } else { TokenKind::Identifier };
            tokens.push(Token { kind, text: word.to_string(), position: start });
            continue;
        }

        match ch {
            '*' => {
                cursor.bump();
                tokens.push(Token { kind: TokenKind::Star, text: "*".to_string(), position: start });
            }
            '(' | ')' | ',' | '.' => {
                cursor.bump();
                tokens.push(Token {
                    kind: TokenKind::Punctuation,
                    text: ch.to_string(),
                    position: start,
                });
            }
            '<' => {
                cursor.bump();
                let op = match cursor.peek() {
                    Some((_, '=')) => {
                        cursor.bump();
                        "<="
                    }
                    Some((_, '>')) => {
                        cursor.bump();
                        "<>"
                    }
                    _ => "<",
                };
                tokens.push(Token {
                    kind: TokenKind::Operator,
                    text: op.to_string(),
                    position: start,
                });
            }
            '>' => {
                cursor.bump();
                let op = if matches!(cursor.peek(), Some((_, '='))) {
                    cursor.bump();
                    ">="
                } else {
                    ">"
                };
                tokens.push(Token {
                    kind: TokenKind::Operator,
                    text: op.to_string(),
                    position: start,
                });
            }
            '!' => {
                cursor.bump();
                if matches!(cursor.peek(), Some((_, '='))) {
                    cursor.bump();
                    tokens.push(Token {
                        kind: TokenKind::Operator,
                        text: "!=".to_string(),
                        position: start,
                    });
                } else {
                    return Err(SqlError::Lex {
                        position: start,
                        message: "unexpected character '!'".to_string(),
                    });
                }
            }
            '=' | '+' | '-' | '/' => {
                cursor.bump();
                tokens.push(Token {
                    kind: TokenKind::Operator,
                    text: ch.to_string(),
                    position: start,
                });
            }
            other => {
                return Err(SqlError::Lex {
                    position: start,
                    message: format!("unexpected character {other:?}"),
                });
            }
        }
    }

    Ok(tokens)
}
