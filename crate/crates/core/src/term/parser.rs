//! Recursive descent over the grammar
//!
//! ```text
//! term     := sum
//! sum      := prod ('+' prod)*
//! prod     := atom ('*' atom)*
//! atom     := IDENT | '(' term ')'
//! identity := term ('=' | '<=') term
//! quasi    := identity ('&' identity)* '->' identity
//! IDENT    := [A-Za-z][A-Za-z0-9_']*
//! ```

use std::fmt;

use thiserror::Error;

use super::{Formula, Identity, QuasiIdentity, Term};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct SyntaxError {
    /// Zero-based byte offset of the offending token (or of end of input).
    pub offset: usize,
    pub expected: Vec<&'static str>,
    pub found: String,
}

impl SyntaxError {
    /// One-based column, for human-facing messages.
    pub fn column(&self) -> usize {
        self.offset + 1
    }
}

impl fmt::Display for SyntaxError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "syntax error at byte {} (column {}): expected {}, found {}",
            self.offset,
            self.column(),
            self.expected.join(" or "),
            self.found
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok<'a> {
    Ident(&'a str),
    Plus,
    Star,
    LParen,
    RParen,
    Eq,
    Le,
    Amp,
    Arrow,
    Eof,
    Bad(char),
}

impl Tok<'_> {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Plus => "`+`".into(),
            Tok::Star => "`*`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Eq => "`=`".into(),
            Tok::Le => "`<=`".into(),
            Tok::Amp => "`&`".into(),
            Tok::Arrow => "`->`".into(),
            Tok::Eof => "end of input".into(),
            Tok::Bad(c) => format!("`{c}`"),
        }
    }
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
    tok: Tok<'a>,
    tok_start: usize,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Self {
        let mut p = Parser {
            src,
            pos: 0,
            tok: Tok::Eof,
            tok_start: 0,
        };
        p.advance();
        p
    }

    fn advance(&mut self) {
        let bytes = self.src.as_bytes();
        while self.pos < bytes.len() && bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        self.tok_start = self.pos;
        let Some(c) = self.src[self.pos..].chars().next() else {
            self.tok = Tok::Eof;
            return;
        };
        let rest = &self.src[self.pos..];
        let (tok, len) = match c {
            '+' => (Tok::Plus, 1),
            '*' => (Tok::Star, 1),
            '(' => (Tok::LParen, 1),
            ')' => (Tok::RParen, 1),
            '=' => (Tok::Eq, 1),
            '&' => (Tok::Amp, 1),
            '<' if rest.starts_with("<=") => (Tok::Le, 2),
            '-' if rest.starts_with("->") => (Tok::Arrow, 2),
            c if c.is_ascii_alphabetic() => {
                let len = rest
                    .bytes()
                    .take_while(|b| b.is_ascii_alphanumeric() || *b == b'_' || *b == b'\'')
                    .count();
                (Tok::Ident(&rest[..len]), len)
            }
            c => (Tok::Bad(c), c.len_utf8()),
        };
        self.tok = tok;
        self.pos += len;
    }

    fn error(&self, expected: &[&'static str]) -> SyntaxError {
        SyntaxError {
            offset: self.tok_start,
            expected: expected.to_vec(),
            found: self.tok.describe(),
        }
    }

    fn term(&mut self) -> Result<Term, SyntaxError> {
        let mut t = self.prod()?;
        while self.tok == Tok::Plus {
            self.advance();
            t = t.join(self.prod()?);
        }
        Ok(t)
    }

    fn prod(&mut self) -> Result<Term, SyntaxError> {
        let mut t = self.atom()?;
        while self.tok == Tok::Star {
            self.advance();
            t = t.meet(self.atom()?);
        }
        Ok(t)
    }

    fn atom(&mut self) -> Result<Term, SyntaxError> {
        match self.tok {
            Tok::Ident(name) => {
                self.advance();
                Ok(Term::var(name))
            }
            Tok::LParen => {
                self.advance();
                let t = self.term()?;
                if self.tok != Tok::RParen {
                    return Err(self.error(&["`)`", "`+`", "`*`"]));
                }
                self.advance();
                Ok(t)
            }
            _ => Err(self.error(&["identifier", "`(`"])),
        }
    }

    fn identity_rest(&mut self, lhs: Term) -> Result<Identity, SyntaxError> {
        let le = match self.tok {
            Tok::Eq => false,
            Tok::Le => true,
            _ => return Err(self.error(&["`=`", "`<=`"])),
        };
        self.advance();
        let rhs = self.term()?;
        Ok(if le {
            Identity::inequation(lhs, rhs)
        } else {
            Identity::equation(lhs, rhs)
        })
    }

    fn identity(&mut self) -> Result<Identity, SyntaxError> {
        let lhs = self.term()?;
        self.identity_rest(lhs)
    }

    fn formula(&mut self) -> Result<Formula, SyntaxError> {
        let lhs = self.term()?;
        if matches!(self.tok, Tok::Eof) {
            return Ok(Formula::Term(lhs));
        }
        if !matches!(self.tok, Tok::Eq | Tok::Le) {
            return Err(self.error(&["`+`", "`*`", "`=`", "`<=`", "end of input"]));
        }
        let first = self.identity_rest(lhs)?;
        let mut premises = vec![first];
        loop {
            match self.tok {
                Tok::Eof if premises.len() == 1 => {
                    return Ok(Formula::Identity(premises.pop().unwrap()))
                }
                Tok::Amp => {
                    self.advance();
                    premises.push(self.identity()?);
                }
                Tok::Arrow => {
                    self.advance();
                    let conclusion = self.identity()?;
                    self.expect_eof()?;
                    return Ok(Formula::Quasi(QuasiIdentity {
                        premises,
                        conclusion,
                    }));
                }
                _ => return Err(self.error(&["`&`", "`->`"])),
            }
        }
    }

    fn expect_eof(&self) -> Result<(), SyntaxError> {
        if self.tok == Tok::Eof {
            Ok(())
        } else {
            Err(self.error(&["end of input"]))
        }
    }
}

/// Parses a term, identity or quasi-identity.
pub fn parse(input: &str) -> Result<Formula, SyntaxError> {
    Parser::new(input).formula()
}

pub fn parse_term(input: &str) -> Result<Term, SyntaxError> {
    let mut p = Parser::new(input);
    let t = p.term()?;
    p.expect_eof()?;
    Ok(t)
}

pub fn parse_identity(input: &str) -> Result<Identity, SyntaxError> {
    let mut p = Parser::new(input);
    let id = p.identity()?;
    p.expect_eof()?;
    Ok(id)
}

/// Parses a quasi-identity; a bare identity is accepted as one with no premises.
pub fn parse_quasi(input: &str) -> Result<QuasiIdentity, SyntaxError> {
    match parse(input)? {
        Formula::Term(_) => Err(SyntaxError {
            offset: input.len(),
            expected: vec!["`=`", "`<=`"],
            found: "end of input".into(),
        }),
        f => Ok(f.into_quasi().expect("identity or quasi-identity")),
    }
}
