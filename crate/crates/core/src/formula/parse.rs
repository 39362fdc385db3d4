//! Recursive-descent parser for the concrete formula syntax.

use super::{Formula, Term};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Param(usize),
    Ident0,
    LParen,
    RParen,
    Star,
    InvMark,
    Equals,
    Tilde,
    Amp,
    Bar,
    Dot,
    Exists,
    Forall,
    End,
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Ident(s) => format!("`{s}`"),
        Tok::Param(i) => format!("`a{i}`"),
        Tok::Ident0 => "`e`".into(),
        Tok::LParen => "`(`".into(),
        Tok::RParen => "`)`".into(),
        Tok::Star => "`*`".into(),
        Tok::InvMark => "`^-1`".into(),
        Tok::Equals => "`=`".into(),
        Tok::Tilde => "`~`".into(),
        Tok::Amp => "`&`".into(),
        Tok::Bar => "`|`".into(),
        Tok::Dot => "`.`".into(),
        Tok::Exists => "`exists`".into(),
        Tok::Forall => "`forall`".into(),
        Tok::End => "end of input".into(),
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let simple = match c {
            b'(' => Some(Tok::LParen),
            b')' => Some(Tok::RParen),
            b'*' => Some(Tok::Star),
            b'=' => Some(Tok::Equals),
            b'~' => Some(Tok::Tilde),
            b'&' => Some(Tok::Amp),
            b'|' => Some(Tok::Bar),
            b'.' => Some(Tok::Dot),
            _ => None,
        };
        if let Some(t) = simple {
            out.push((t, start));
            i += 1;
        } else if c.is_ascii_whitespace() {
            i += 1;
        } else if c == b'^' {
            if text[i..].starts_with("^-1") {
                out.push((Tok::InvMark, start));
                i += 3;
            } else {
                return Err(Error::Syntax { pos: start, msg: "expected `^-1`".into() });
            }
        } else if c.is_ascii_alphabetic() || c == b'_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            let word = &text[start..i];
            let tok = match word {
                "exists" => Tok::Exists,
                "forall" => Tok::Forall,
                "e" => Tok::Ident0,
                _ if word.len() > 1 && word.starts_with('a') && word[1..].bytes().all(|b| b.is_ascii_digit()) => {
                    let idx = word[1..].parse().map_err(|_| Error::Syntax {
                        pos: start,
                        msg: "parameter index too large".into(),
                    })?;
                    Tok::Param(idx)
                }
                _ => Tok::Ident(word.to_string()),
            };
            out.push((tok, start));
        } else {
            let ch = text[i..].chars().next().unwrap();
            return Err(Error::Syntax { pos: start, msg: format!("unexpected character `{ch}`") });
        }
    }
    out.push((Tok::End, text.len()));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn here(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if t != Tok::End {
            self.pos += 1;
        }
        t
    }

    fn err<T>(&self, what: &str) -> Result<T> {
        Err(Error::Syntax {
            pos: self.here(),
            msg: format!("expected {what}, found {}", describe(self.peek())),
        })
    }

    fn expect(&mut self, t: Tok) -> Result<()> {
        if *self.peek() == t {
            self.bump();
            Ok(())
        } else {
            self.err(&describe(&t))
        }
    }

    fn formula(&mut self) -> Result<Formula> {
        match self.peek() {
            Tok::Exists | Tok::Forall => {
                let q = self.bump();
                let v = match self.bump() {
                    Tok::Ident(v) => v,
                    _ => {
                        self.pos -= 1;
                        return self.err("a variable name");
                    }
                };
                self.expect(Tok::Dot)?;
                let body = self.formula()?;
                Ok(if q == Tok::Exists {
                    Formula::exists(&v, body)
                } else {
                    Formula::forall(&v, body)
                })
            }
            _ => self.disj(),
        }
    }

    fn disj(&mut self) -> Result<Formula> {
        let mut parts = vec![self.conj()?];
        while *self.peek() == Tok::Bar {
            self.bump();
            parts.push(self.conj()?);
        }
        Ok(if parts.len() == 1 { parts.pop().unwrap() } else { Formula::Or(parts) })
    }

    fn conj(&mut self) -> Result<Formula> {
        let mut parts = vec![self.atomf()?];
        while *self.peek() == Tok::Amp {
            self.bump();
            parts.push(self.atomf()?);
        }
        Ok(if parts.len() == 1 { parts.pop().unwrap() } else { Formula::And(parts) })
    }

    fn atomf(&mut self) -> Result<Formula> {
        match self.peek() {
            Tok::Tilde => {
                self.bump();
                Ok(Formula::not(self.atomf()?))
            }
            Tok::LParen => {
                // `(` opens either a term or a formula; try the equation first.
                let save = self.pos;
                let as_eq = self.equation();
                if as_eq.is_ok() {
                    return as_eq;
                }
                let eq_pos = self.here();
                self.pos = save;
                self.bump();
                let inner = self.formula().and_then(|f| {
                    self.expect(Tok::RParen)?;
                    Ok(f)
                });
                match inner {
                    Ok(f) => Ok(f),
                    Err(e) => {
                        // report whichever reading got further
                        let pos_f = match &e {
                            Error::Syntax { pos, .. } => *pos,
                            _ => 0,
                        };
                        if eq_pos > pos_f {
                            as_eq
                        } else {
                            Err(e)
                        }
                    }
                }
            }
            _ => self.equation(),
        }
    }

    fn equation(&mut self) -> Result<Formula> {
        let lhs = self.term()?;
        self.expect(Tok::Equals)?;
        let rhs = self.term()?;
        Ok(Formula::eq(lhs, rhs))
    }

    fn term(&mut self) -> Result<Term> {
        let mut t = self.factor()?;
        while *self.peek() == Tok::Star {
            self.bump();
            t = Term::compose(t, self.factor()?);
        }
        Ok(t)
    }

    fn factor(&mut self) -> Result<Term> {
        let base = self.base()?;
        if *self.peek() == Tok::InvMark {
            self.bump();
            Ok(Term::inverse(base))
        } else {
            Ok(base)
        }
    }

    fn base(&mut self) -> Result<Term> {
        match self.peek().clone() {
            Tok::Ident(v) => {
                self.bump();
                Ok(Term::Var(v))
            }
            Tok::Param(i) => {
                self.bump();
                Ok(Term::Param(i))
            }
            Tok::Ident0 => {
                self.bump();
                Ok(Term::Identity)
            }
            Tok::LParen => {
                self.bump();
                let t = self.term()?;
                self.expect(Tok::RParen)?;
                Ok(t)
            }
            _ => self.err("a term"),
        }
    }
}

fn parse_raw(text: &str) -> Result<Formula> {
    let mut p = Parser { toks: lex(text)?, pos: 0 };
    let f = p.formula()?;
    if *p.peek() != Tok::End {
        return p.err("end of input");
    }
    Ok(f.with_unique_binders())
}

/// Parses a sentence: every variable must be bound.
pub fn parse(text: &str) -> Result<Formula> {
    let f = parse_raw(text)?;
    if let Some(v) = f.free_vars().into_iter().next() {
        return Err(Error::UnboundVariable(v));
    }
    Ok(f)
}

/// Parses a formula that may have free variables.
pub fn parse_open(text: &str) -> Result<Formula> {
    parse_raw(text)
}
