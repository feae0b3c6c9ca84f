use std::fmt;

use super::diagnostic::{Diagnostic, Span};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    /// Lowercase-initial identifier: term or capture variable.
    Lower(String),
    /// Uppercase-initial identifier: type variable.
    Upper(String),
    Loc(usize),
    Fun,
    Forall,
    Exists,
    Let,
    In,
    Val,
    Top,
    LParen,
    RParen,
    LBracket,
    RBracket,
    LBrace,
    RBrace,
    Lt,
    Gt,
    Comma,
    Colon,
    Dot,
    Eq,
    Arrow,
    SubBound,
    Caret,
    Star,
    Semi,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Lower(s) | Tok::Upper(s) => write!(f, "identifier `{s}`"),
            Tok::Loc(n) => write!(f, "location `@{n}`"),
            Tok::Eof => f.write_str("end of input"),
            other => write!(f, "`{}`", other.lexeme()),
        }
    }
}

impl Tok {
    fn lexeme(&self) -> &'static str {
        match self {
            Tok::Fun => "fun",
            Tok::Forall => "forall",
            Tok::Exists => "exists",
            Tok::Let => "let",
            Tok::In => "in",
            Tok::Val => "val",
            Tok::Top => "Top",
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::LBracket => "[",
            Tok::RBracket => "]",
            Tok::LBrace => "{",
            Tok::RBrace => "}",
            Tok::Lt => "<",
            Tok::Gt => ">",
            Tok::Comma => ",",
            Tok::Colon => ":",
            Tok::Dot => ".",
            Tok::Eq => "=",
            Tok::Arrow => "=>",
            Tok::SubBound => "<:",
            Tok::Caret => "^",
            Tok::Star => "*",
            Tok::Semi => ";",
            Tok::Lower(_) | Tok::Upper(_) | Tok::Loc(_) | Tok::Eof => "",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Token {
    pub tok: Tok,
    pub span: Span,
}

pub fn lex(source: &str) -> Result<Vec<Token>, Diagnostic> {
    let bytes = source.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let ch = source[i..].chars().next().unwrap_or('\0');
        if ch.is_whitespace() {
            i += ch.len_utf8();
            continue;
        }
        if ch == '#' {
            while i < bytes.len() && bytes[i] != b'\n' {
                i += 1;
            }
            continue;
        }
        let start = i;
        let two = source.get(i..i + 2).unwrap_or("");
        let (tok, len) = match two {
            "=>" => (Tok::Arrow, 2),
            "<:" => (Tok::SubBound, 2),
            _ => match ch {
                '(' => (Tok::LParen, 1),
                ')' => (Tok::RParen, 1),
                '[' => (Tok::LBracket, 1),
                ']' => (Tok::RBracket, 1),
                '{' => (Tok::LBrace, 1),
                '}' => (Tok::RBrace, 1),
                '<' => (Tok::Lt, 1),
                '>' => (Tok::Gt, 1),
                ',' => (Tok::Comma, 1),
                ':' => (Tok::Colon, 1),
                '.' => (Tok::Dot, 1),
                '=' => (Tok::Eq, 1),
                '^' => (Tok::Caret, 1),
                '*' => (Tok::Star, 1),
                ';' => (Tok::Semi, 1),
                '@' => {
                    let digits: String = source[i + 1..]
                        .chars()
                        .take_while(|c| c.is_ascii_digit())
                        .collect();
                    let n = digits.parse::<usize>().map_err(|_| {
                        Diagnostic::error(
                            "E0001",
                            "expected digits after `@` in a location literal",
                            Span::new(i, i + 1),
                        )
                    })?;
                    (Tok::Loc(n), 1 + digits.len())
                }
                c if c.is_ascii_alphabetic() || c == '_' => {
                    let word: String = source[i..]
                        .chars()
                        .take_while(|c| c.is_ascii_alphanumeric() || *c == '_' || *c == '\'')
                        .collect();
                    let len = word.len();
                    let tok = match word.as_str() {
                        "fun" => Tok::Fun,
                        "forall" => Tok::Forall,
                        "exists" => Tok::Exists,
                        "let" => Tok::Let,
                        "in" => Tok::In,
                        "val" => Tok::Val,
                        "Top" => Tok::Top,
                        _ if c.is_ascii_uppercase() => Tok::Upper(word),
                        _ => Tok::Lower(word),
                    };
                    (tok, len)
                }
                other => {
                    return Err(Diagnostic::error(
                        "E0001",
                        format!("unexpected character `{other}`"),
                        Span::new(i, i + other.len_utf8()),
                    ))
                }
            },
        };
        i += len;
        out.push(Token {
            tok,
            span: Span::new(start, i),
        });
    }
    out.push(Token {
        tok: Tok::Eof,
        span: Span::new(source.len(), source.len()),
    });
    Ok(out)
}
