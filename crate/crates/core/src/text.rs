//! Shared tokenizer for the small text formats (set expressions, world specs,
//! formulas, model and pair fixtures).

use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    /// Digits kept verbatim so bit strings survive leading zeros.
    Digits(String),
    Punct(&'static str),
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) | Tok::Digits(s) => write!(f, "`{s}`"),
            Tok::Punct(p) => write!(f, "`{p}`"),
        }
    }
}

const PUNCT: &[&str] = &[
    "<->", "->", "_|_", "(", ")", "{", "}", "[", "]", ",", ";", "=", ".", "|", "&", "~", "\\",
];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{message} at offset {pos}")]
pub struct SyntaxError {
    pub pos: usize,
    pub message: String,
}

impl SyntaxError {
    pub fn new(pos: usize, message: impl Into<String>) -> Self {
        SyntaxError { pos, message: message.into() }
    }
}

pub fn tokenize(src: &str) -> Result<Vec<(Tok, usize)>, SyntaxError> {
    let mut out = Vec::new();
    let bytes = src.as_bytes();
    let mut i = 0;
    'outer: while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c == '#' {
            while i < bytes.len() && bytes[i] != b'\n' {
                i += 1;
            }
            continue;
        }
        for p in PUNCT {
            if src[i..].starts_with(p) {
                out.push((Tok::Punct(p), i));
                i += p.len();
                continue 'outer;
            }
        }
        let start = i;
        if c.is_ascii_digit() {
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            out.push((Tok::Digits(src[start..i].to_string()), start));
        } else if c.is_ascii_alphabetic() || c == '_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((Tok::Ident(src[start..i].to_string()), start));
        } else {
            return Err(SyntaxError::new(i, format!("unexpected character `{c}`")));
        }
    }
    Ok(out)
}

/// Token stream with one-token lookahead.
pub struct Cursor {
    toks: Vec<(Tok, usize)>,
    at: usize,
    end: usize,
}

impl Cursor {
    pub fn new(src: &str) -> Result<Self, SyntaxError> {
        Ok(Cursor { toks: tokenize(src)?, at: 0, end: src.len() })
    }

    pub fn pos(&self) -> usize {
        self.toks.get(self.at).map_or(self.end, |(_, p)| *p)
    }

    pub fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|(t, _)| t)
    }

    pub fn peek_punct(&self, p: &str) -> bool {
        matches!(self.peek(), Some(Tok::Punct(q)) if *q == p)
    }

    pub fn peek_ident(&self, name: &str) -> bool {
        matches!(self.peek(), Some(Tok::Ident(s)) if s == name)
    }

    pub fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.at).map(|(t, _)| t.clone());
        self.at += 1;
        t
    }

    pub fn eat_punct(&mut self, p: &str) -> bool {
        if self.peek_punct(p) {
            self.at += 1;
            true
        } else {
            false
        }
    }

    pub fn eat_ident(&mut self, name: &str) -> bool {
        if self.peek_ident(name) {
            self.at += 1;
            true
        } else {
            false
        }
    }

    pub fn error(&self, message: impl Into<String>) -> SyntaxError {
        let found = match self.peek() {
            Some(t) => format!(", found {t}"),
            None => ", found end of input".to_string(),
        };
        SyntaxError::new(self.pos(), format!("{}{}", message.into(), found))
    }

    pub fn expect_punct(&mut self, p: &str) -> Result<(), SyntaxError> {
        if self.eat_punct(p) {
            Ok(())
        } else {
            Err(self.error(format!("expected `{p}`")))
        }
    }

    pub fn expect_ident(&mut self, name: &str) -> Result<(), SyntaxError> {
        if self.eat_ident(name) {
            Ok(())
        } else {
            Err(self.error(format!("expected `{name}`")))
        }
    }

    pub fn ident(&mut self) -> Result<String, SyntaxError> {
        match self.peek() {
            Some(Tok::Ident(s)) => {
                let s = s.clone();
                self.at += 1;
                Ok(s)
            }
            _ => Err(self.error("expected identifier")),
        }
    }

    pub fn digits(&mut self) -> Result<String, SyntaxError> {
        match self.peek() {
            Some(Tok::Digits(s)) => {
                let s = s.clone();
                self.at += 1;
                Ok(s)
            }
            _ => Err(self.error("expected number")),
        }
    }

    pub fn number(&mut self) -> Result<u64, SyntaxError> {
        let pos = self.pos();
        let d = self.digits()?;
        d.parse().map_err(|_| SyntaxError::new(pos, format!("number `{d}` out of range")))
    }

    /// `{a, b, c}` of naturals.
    pub fn number_set(&mut self) -> Result<Vec<u64>, SyntaxError> {
        self.expect_punct("{")?;
        let mut out = Vec::new();
        if !self.eat_punct("}") {
            loop {
                out.push(self.number()?);
                if self.eat_punct("}") {
                    break;
                }
                self.expect_punct(",")?;
            }
        }
        Ok(out)
    }

    pub fn at_end(&self) -> bool {
        self.at >= self.toks.len()
    }

    pub fn expect_end(&self) -> Result<(), SyntaxError> {
        if self.at_end() {
            Ok(())
        } else {
            Err(self.error("expected end of input"))
        }
    }
}
