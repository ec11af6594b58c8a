//! Tokenizer for the expression grammar.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Comma,
}

impl std::fmt::Display for Tok {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Tok::Num(v) => write!(f, "{v}"),
            Tok::Ident(s) => write!(f, "{s}"),
            Tok::Plus => write!(f, "+"),
            Tok::Minus => write!(f, "-"),
            Tok::Star => write!(f, "*"),
            Tok::Slash => write!(f, "/"),
            Tok::Caret => write!(f, "^"),
            Tok::LParen => write!(f, "("),
            Tok::RParen => write!(f, ")"),
            Tok::Comma => write!(f, ","),
        }
    }
}

/// Token with its starting byte offset in the source.
#[derive(Debug, Clone, PartialEq)]
pub struct Spanned {
    pub tok: Tok,
    pub pos: usize,
}

pub fn tokenize(src: &str) -> Result<Vec<Spanned>> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        let pos = i;
        match c {
            ' ' | '\t' | '\n' | '\r' => {
                i += 1;
            }
            '+' => {
                out.push(Spanned { tok: Tok::Plus, pos });
                i += 1;
            }
            '-' => {
                out.push(Spanned { tok: Tok::Minus, pos });
                i += 1;
            }
            '*' => {
                out.push(Spanned { tok: Tok::Star, pos });
                i += 1;
            }
            '/' => {
                out.push(Spanned { tok: Tok::Slash, pos });
                i += 1;
            }
            '^' => {
                out.push(Spanned { tok: Tok::Caret, pos });
                i += 1;
            }
            '(' => {
                out.push(Spanned { tok: Tok::LParen, pos });
                i += 1;
            }
            ')' => {
                out.push(Spanned { tok: Tok::RParen, pos });
                i += 1;
            }
            ',' => {
                out.push(Spanned { tok: Tok::Comma, pos });
                i += 1;
            }
            '0'..='9' | '.' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                if i < bytes.len() && bytes[i] == b'.' {
                    i += 1;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                }
                if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                    let mut j = i + 1;
                    if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                        j += 1;
                    }
                    if j < bytes.len() && bytes[j].is_ascii_digit() {
                        i = j;
                        while i < bytes.len() && bytes[i].is_ascii_digit() {
                            i += 1;
                        }
                    }
                }
                let text = &src[start..i];
                let v: f64 = text.parse().map_err(|_| Error::Syntax {
                    pos: start,
                    msg: format!("invalid number `{text}`"),
                })?;
                out.push(Spanned {
                    tok: Tok::Num(v),
                    pos: start,
                });
            }
            'a'..='z' | 'A'..='Z' | '_' => {
                let start = i;
                while i < bytes.len()
                    && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_')
                {
                    i += 1;
                }
                out.push(Spanned {
                    tok: Tok::Ident(src[start..i].to_string()),
                    pos: start,
                });
            }
            _ => {
                return Err(Error::Syntax {
                    pos,
                    msg: format!("unexpected character `{c}`"),
                })
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_and_idents() {
        let toks = tokenize("2*t + 1e-3*xi^.5").unwrap();
        let kinds: Vec<Tok> = toks.into_iter().map(|s| s.tok).collect();
        assert_eq!(
            kinds,
            vec![
                Tok::Num(2.0),
                Tok::Star,
                Tok::Ident("t".into()),
                Tok::Plus,
                Tok::Num(1e-3),
                Tok::Star,
                Tok::Ident("xi".into()),
                Tok::Caret,
                Tok::Num(0.5),
            ]
        );
    }

    #[test]
    fn rejects_stray_character() {
        let err = tokenize("t @ 2").unwrap_err();
        assert!(matches!(err, Error::Syntax { pos: 2, .. }));
    }
}
