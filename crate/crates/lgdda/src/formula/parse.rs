//! Concrete syntax.
//!
//! ```text
//! formula := imp ( "<->" imp )*                    left-assoc
//! imp     := or ( "->" imp )?                      right-assoc
//! or      := and ( "|" and )*
//! and     := unary ( "&" unary )*
//! unary   := "~" unary
//!          | "B" "{" agent "," grade "}" unary     explicit belief, grade >= 1 or w
//!          | "D" "{" agents "," nat "}" unary      distributed belief, finite grade
//!          | "Dhat" "{" agents "," nat "}" unary   ~D{J,k}~ .
//!          | "disagree" "{" agents "," nat "}"     D{J,k-1} false, k >= 1
//!          | primary
//! primary := atom | "true" | "false" | "(" formula ")"
//! ```
//!
//! Agents are identifiers or bare integers; groups are space-separated.
//! `B`, `D` and `Dhat` are ordinary atoms unless followed by `{`.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use crate::agents::{Agent, Group};
use crate::formula::{InnerFormula, OuterFormula};
use crate::grades::Grade;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("parse error at offset {offset}: {message}")]
pub struct ParseError {
    pub offset: usize,
    pub message: String,
}

impl ParseError {
    fn new(offset: usize, message: impl Into<String>) -> Self {
        ParseError {
            offset,
            message: message.into(),
        }
    }
}

/// Parses a distributed-belief layer formula.
pub fn parse(text: &str) -> Result<OuterFormula, ParseError> {
    Parser::new(text, None)?.run(false)
}

/// Like [`parse`], but every mentioned agent must belong to `declared`.
pub fn parse_with_agents(
    text: &str,
    declared: &BTreeSet<Agent>,
) -> Result<OuterFormula, ParseError> {
    Parser::new(text, Some(declared))?.run(false)
}

/// Parses an explicit-belief layer formula (no `D`, `Dhat` or `disagree`).
pub fn parse_inner(text: &str) -> Result<Arc<InnerFormula>, ParseError> {
    lower(Parser::new(text, None)?.run(true))
}

/// Inner-layer parse with a declared agent set.
pub fn parse_inner_with_agents(
    text: &str,
    declared: &BTreeSet<Agent>,
) -> Result<Arc<InnerFormula>, ParseError> {
    lower(Parser::new(text, Some(declared))?.run(true))
}

fn lower(parsed: Result<OuterFormula, ParseError>) -> Result<Arc<InnerFormula>, ParseError> {
    match parsed? {
        OuterFormula::Inner(a) => Ok(a),
        _ => unreachable!("inner-mode parse cannot produce a box"),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(u64),
    Tilde,
    Amp,
    Pipe,
    Arrow,
    DoubleArrow,
    LParen,
    RParen,
    LBrace,
    RBrace,
    Comma,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "identifier {s:?}"),
            Tok::Int(n) => write!(f, "number {n}"),
            Tok::Tilde => f.write_str("'~'"),
            Tok::Amp => f.write_str("'&'"),
            Tok::Pipe => f.write_str("'|'"),
            Tok::Arrow => f.write_str("'->'"),
            Tok::DoubleArrow => f.write_str("'<->'"),
            Tok::LParen => f.write_str("'('"),
            Tok::RParen => f.write_str("')'"),
            Tok::LBrace => f.write_str("'{'"),
            Tok::RBrace => f.write_str("'}'"),
            Tok::Comma => f.write_str("','"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

fn lex(src: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = src.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        match c {
            b' ' | b'\t' | b'\r' | b'\n' => i += 1,
            b'~' => {
                toks.push((Tok::Tilde, i));
                i += 1;
            }
            b'&' => {
                toks.push((Tok::Amp, i));
                i += 1;
            }
            b'|' => {
                toks.push((Tok::Pipe, i));
                i += 1;
            }
            b'(' => {
                toks.push((Tok::LParen, i));
                i += 1;
            }
            b')' => {
                toks.push((Tok::RParen, i));
                i += 1;
            }
            b'{' => {
                toks.push((Tok::LBrace, i));
                i += 1;
            }
            b'}' => {
                toks.push((Tok::RBrace, i));
                i += 1;
            }
            b',' => {
                toks.push((Tok::Comma, i));
                i += 1;
            }
            b'-' => {
                if bytes.get(i + 1) == Some(&b'>') {
                    toks.push((Tok::Arrow, i));
                    i += 2;
                } else {
                    return Err(ParseError::new(i, "expected '->'"));
                }
            }
            b'<' => {
                if bytes.get(i + 1) == Some(&b'-') && bytes.get(i + 2) == Some(&b'>') {
                    toks.push((Tok::DoubleArrow, i));
                    i += 3;
                } else {
                    return Err(ParseError::new(i, "expected '<->'"));
                }
            }
            b'0'..=b'9' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let text = &src[start..i];
                let n: u64 = text
                    .parse()
                    .map_err(|_| ParseError::new(start, format!("number out of range: {text}")))?;
                toks.push((Tok::Int(n), start));
            }
            _ if c.is_ascii_alphabetic() || c == b'_' => {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                toks.push((Tok::Ident(src[start..i].to_string()), start));
            }
            _ => {
                return Err(ParseError::new(
                    i,
                    format!("unexpected character {:?}", src[i..].chars().next().unwrap()),
                ));
            }
        }
    }
    toks.push((Tok::Eof, src.len()));
    Ok(toks)
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    declared: Option<&'a BTreeSet<Agent>>,
}

impl<'a> Parser<'a> {
    fn new(src: &str, declared: Option<&'a BTreeSet<Agent>>) -> Result<Self, ParseError> {
        Ok(Parser {
            toks: lex(src)?,
            pos: 0,
            declared,
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn peek2(&self) -> &Tok {
        &self.toks[(self.pos + 1).min(self.toks.len() - 1)].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> (Tok, usize) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, want: &Tok) -> Result<usize, ParseError> {
        if self.peek() == want {
            Ok(self.bump().1)
        } else {
            Err(ParseError::new(
                self.offset(),
                format!("expected {want}, found {}", self.peek()),
            ))
        }
    }

    fn run(&mut self, inner_only: bool) -> Result<OuterFormula, ParseError> {
        let f = self.formula(inner_only)?;
        match self.peek() {
            Tok::Eof => Ok(f),
            t => Err(ParseError::new(
                self.offset(),
                format!("unexpected {t} after formula"),
            )),
        }
    }

    fn formula(&mut self, inner: bool) -> Result<OuterFormula, ParseError> {
        let mut acc = self.imp(inner)?;
        while *self.peek() == Tok::DoubleArrow {
            self.bump();
            let rhs = self.imp(inner)?;
            acc = acc.iff(rhs);
        }
        Ok(acc)
    }

    fn imp(&mut self, inner: bool) -> Result<OuterFormula, ParseError> {
        let lhs = self.or(inner)?;
        if *self.peek() == Tok::Arrow {
            self.bump();
            let rhs = self.imp(inner)?;
            Ok(lhs.imp(rhs))
        } else {
            Ok(lhs)
        }
    }

    fn or(&mut self, inner: bool) -> Result<OuterFormula, ParseError> {
        let mut acc = self.and(inner)?;
        while *self.peek() == Tok::Pipe {
            self.bump();
            let rhs = self.and(inner)?;
            acc = acc.or(rhs);
        }
        Ok(acc)
    }

    fn and(&mut self, inner: bool) -> Result<OuterFormula, ParseError> {
        let mut acc = self.unary(inner)?;
        while *self.peek() == Tok::Amp {
            self.bump();
            let rhs = self.unary(inner)?;
            acc = acc.and(rhs);
        }
        Ok(acc)
    }

    fn unary(&mut self, inner: bool) -> Result<OuterFormula, ParseError> {
        match self.peek() {
            Tok::Tilde => {
                self.bump();
                Ok(self.unary(inner)?.neg())
            }
            Tok::Ident(name) if *self.peek2() == Tok::LBrace => {
                let name = name.clone();
                let at = self.offset();
                match name.as_str() {
                    "B" => self.triangle(inner),
                    "D" | "Dhat" | "disagree" => {
                        if inner {
                            return Err(ParseError::new(
                                at,
                                format!("{name} cannot occur inside an explicit-belief body"),
                            ));
                        }
                        match name.as_str() {
                            "D" => self.boxed(),
                            "Dhat" => self.dhat(),
                            _ => self.disagree(),
                        }
                    }
                    _ => Err(ParseError::new(at, format!("unknown operator {name:?}"))),
                }
            }
            _ => self.primary(inner),
        }
    }

    fn triangle(&mut self, _inner: bool) -> Result<OuterFormula, ParseError> {
        self.bump(); // B
        self.expect(&Tok::LBrace)?;
        let agent = self.agent()?;
        self.expect(&Tok::Comma)?;
        let at = self.offset();
        let grade = self.grade()?;
        if grade < Grade::ONE {
            return Err(ParseError::new(
                at,
                "explicit-belief grade must be at least 1",
            ));
        }
        self.expect(&Tok::RBrace)?;
        let at = self.offset();
        let body = self.unary(true)?;
        let body = body
            .as_inner()
            .cloned()
            .ok_or_else(|| ParseError::new(at, "explicit-belief body must be box-free"))?;
        Ok(OuterFormula::tri(agent, grade, body))
    }

    fn boxed(&mut self) -> Result<OuterFormula, ParseError> {
        self.bump(); // D
        let (group, grade) = self.group_and_finite_grade()?;
        let body = self.unary(false)?;
        Ok(OuterFormula::boxed(group, grade, body))
    }

    fn dhat(&mut self) -> Result<OuterFormula, ParseError> {
        self.bump(); // Dhat
        let (group, grade) = self.group_and_finite_grade()?;
        let body = self.unary(false)?;
        Ok(OuterFormula::diamond(group, grade, body))
    }

    fn disagree(&mut self) -> Result<OuterFormula, ParseError> {
        self.bump(); // disagree
        let at = self.offset();
        let (group, strength) = self.group_and_finite_grade()?;
        if strength == 0 {
            return Err(ParseError::new(
                at,
                "disagreement strength must be at least 1",
            ));
        }
        Ok(OuterFormula::disagree(group, strength))
    }

    fn group_and_finite_grade(&mut self) -> Result<(Group, u64), ParseError> {
        self.expect(&Tok::LBrace)?;
        let at = self.offset();
        let mut members = Vec::new();
        while !matches!(self.peek(), Tok::Comma) {
            if matches!(self.peek(), Tok::RBrace | Tok::Eof) {
                break;
            }
            members.push(self.agent()?);
        }
        let group =
            Group::new(members).map_err(|_| ParseError::new(at, "group must be nonempty"))?;
        self.expect(&Tok::Comma)?;
        let at = self.offset();
        let grade = match self.grade()? {
            Grade::Finite(n) => n,
            Grade::Omega => {
                return Err(ParseError::new(at, "distributed-belief grade must be finite"));
            }
        };
        self.expect(&Tok::RBrace)?;
        Ok((group, grade))
    }

    fn agent(&mut self) -> Result<Agent, ParseError> {
        let at = self.offset();
        let name = match self.bump().0 {
            Tok::Ident(s) => s,
            Tok::Int(n) => n.to_string(),
            t => return Err(ParseError::new(at, format!("expected an agent, found {t}"))),
        };
        let agent = Agent::new(&name);
        if let Some(declared) = self.declared {
            if !declared.contains(&agent) {
                return Err(ParseError::new(at, format!("agent not declared: {name}")));
            }
        }
        Ok(agent)
    }

    fn grade(&mut self) -> Result<Grade, ParseError> {
        let at = self.offset();
        match self.bump().0 {
            Tok::Int(n) => Ok(Grade::Finite(n)),
            Tok::Ident(s) if s == "w" => Ok(Grade::Omega),
            t => Err(ParseError::new(at, format!("expected a grade, found {t}"))),
        }
    }

    fn primary(&mut self, inner: bool) -> Result<OuterFormula, ParseError> {
        let at = self.offset();
        match self.bump().0 {
            Tok::Ident(name) => match name.as_str() {
                "true" => Ok(OuterFormula::top()),
                "false" => Ok(OuterFormula::bot()),
                _ => Ok(OuterFormula::atom(name)),
            },
            Tok::LParen => {
                let f = self.formula(inner)?;
                self.expect(&Tok::RParen)?;
                Ok(f)
            }
            t => Err(ParseError::new(at, format!("expected a formula, found {t}"))),
        }
    }
}
