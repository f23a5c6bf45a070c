//! Finite-trace linear temporal logic over named boolean atoms.
//!
//! Formulas are evaluated against a finite, non-empty trace of states (maps
//! from atom name to truth value) at a position. Temporal operators use
//! finite-trace semantics with a STRONG next: `X φ` is false at the final
//! position because no successor exists. `G φ` requires φ at every position
//! from the evaluation point to the end, `F φ` at some such position, and
//! `φ U ψ` requires ψ at some reachable position with φ holding at every
//! position strictly before it.
//!
//! Concrete syntax (ASCII): atoms are lowercase identifiers; operators are
//! `!` (not), `&` (and), `|` (or), `->` (implies, right-associative),
//! `X`, `G`, `F` (prefix), and `U` (until, left-associative). Precedence from
//! loosest to tightest: `->` < `|` < `&` < prefix operators < `U`;
//! parentheses override. Note that `U` binds tighter than the prefix
//! operators, so `G a U b` reads `G (a U b)`.

use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

/// One trace position: truth assignment for named atoms.
pub type TraceState = BTreeMap<String, bool>;

/// A temporal formula over named atoms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Formula {
    Atom(String),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Next(Box<Formula>),
    Globally(Box<Formula>),
    Finally(Box<Formula>),
    Until(Box<Formula>, Box<Formula>),
}

/// Binding strength, loosest first. Mirrors the grammar.
fn precedence(f: &Formula) -> u8 {
    match f {
        Formula::Implies(..) => 1,
        Formula::Or(..) => 2,
        Formula::And(..) => 3,
        Formula::Not(_) | Formula::Next(_) | Formula::Globally(_) | Formula::Finally(_) => 4,
        Formula::Until(..) => 5,
        Formula::Atom(_) => 6,
    }
}

impl Formula {
    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        let prec = precedence(self);
        if prec < min {
            write!(f, "(")?;
        }
        match self {
            Formula::Atom(name) => write!(f, "{name}")?,
            Formula::Not(inner) => {
                write!(f, "!")?;
                inner.fmt_prec(f, prec)?;
            }
            Formula::Next(inner) => {
                write!(f, "X ")?;
                inner.fmt_prec(f, prec)?;
            }
            Formula::Globally(inner) => {
                write!(f, "G ")?;
                inner.fmt_prec(f, prec)?;
            }
            Formula::Finally(inner) => {
                write!(f, "F ")?;
                inner.fmt_prec(f, prec)?;
            }
            Formula::And(a, b) => {
                a.fmt_prec(f, prec)?;
                write!(f, " & ")?;
                b.fmt_prec(f, prec + 1)?;
            }
            Formula::Or(a, b) => {
                a.fmt_prec(f, prec)?;
                write!(f, " | ")?;
                b.fmt_prec(f, prec + 1)?;
            }
            Formula::Implies(a, b) => {
                // Right-associative: the left child needs strictly tighter.
                a.fmt_prec(f, prec + 1)?;
                write!(f, " -> ")?;
                b.fmt_prec(f, prec)?;
            }
            Formula::Until(a, b) => {
                a.fmt_prec(f, prec)?;
                write!(f, " U ")?;
                b.fmt_prec(f, prec + 1)?;
            }
        }
        if prec < min {
            write!(f, ")")?;
        }
        Ok(())
    }
}

/// Canonical pretty-printing with minimal parentheses; parsing the output
/// reproduces the formula exactly.
impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("unexpected character {found:?} at byte {offset}")]
    UnknownToken { offset: usize, found: char },
    #[error("at byte {offset}: expected {expected}, found {found}")]
    Unexpected {
        offset: usize,
        expected: &'static str,
        found: String,
    },
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EvalError {
    #[error("trace is empty")]
    EmptyTrace,
    #[error("position {position} outside trace of length {length}")]
    PositionOutOfRange { position: usize, length: usize },
    #[error("atom {atom:?} missing from trace state at position {position}")]
    UnknownAtom { atom: String, position: usize },
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Atom(String),
    Not,
    And,
    Or,
    Implies,
    Next,
    Globally,
    Finally,
    Until,
    LParen,
    RParen,
    End,
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Token::Atom(s) => write!(f, "atom {s:?}"),
            Token::Not => write!(f, "'!'"),
            Token::And => write!(f, "'&'"),
            Token::Or => write!(f, "'|'"),
            Token::Implies => write!(f, "'->'"),
            Token::Next => write!(f, "'X'"),
            Token::Globally => write!(f, "'G'"),
            Token::Finally => write!(f, "'F'"),
            Token::Until => write!(f, "'U'"),
            Token::LParen => write!(f, "'('"),
            Token::RParen => write!(f, "')'"),
            Token::End => write!(f, "end of input"),
        }
    }
}

fn lex(input: &str) -> Result<Vec<(Token, usize)>, ParseError> {
    let bytes = input.as_bytes();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            ' ' | '\t' | '\n' | '\r' => i += 1,
            '!' => {
                tokens.push((Token::Not, i));
                i += 1;
            }
            '&' => {
                tokens.push((Token::And, i));
                i += 1;
            }
            '|' => {
                tokens.push((Token::Or, i));
                i += 1;
            }
            '(' => {
                tokens.push((Token::LParen, i));
                i += 1;
            }
            ')' => {
                tokens.push((Token::RParen, i));
                i += 1;
            }
            '-' => {
                if bytes.get(i + 1) == Some(&b'>') {
                    tokens.push((Token::Implies, i));
                    i += 2;
                } else {
                    return Err(ParseError::UnknownToken {
                        offset: i,
                        found: '-',
                    });
                }
            }
            'X' => {
                tokens.push((Token::Next, i));
                i += 1;
            }
            'G' => {
                tokens.push((Token::Globally, i));
                i += 1;
            }
            'F' => {
                tokens.push((Token::Finally, i));
                i += 1;
            }
            'U' => {
                tokens.push((Token::Until, i));
                i += 1;
            }
            'a'..='z' | '_' => {
                let start = i;
                while i < bytes.len()
                    && matches!(bytes[i] as char, 'a'..='z' | '0'..='9' | '_')
                {
                    i += 1;
                }
                tokens.push((Token::Atom(input[start..i].to_string()), start));
            }
            other => {
                return Err(ParseError::UnknownToken {
                    offset: i,
                    found: other,
                })
            }
        }
    }
    tokens.push((Token::End, bytes.len()));
    Ok(tokens)
}

struct Parser {
    tokens: Vec<(Token, usize)>,
    cursor: usize,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.cursor].0
    }

    fn offset(&self) -> usize {
        self.tokens[self.cursor].1
    }

    fn advance(&mut self) -> Token {
        let t = self.tokens[self.cursor].0.clone();
        self.cursor += 1;
        t
    }

    fn expect(&mut self, token: Token, expected: &'static str) -> Result<(), ParseError> {
        if *self.peek() == token {
            self.advance();
            Ok(())
        } else {
            Err(ParseError::Unexpected {
                offset: self.offset(),
                expected,
                found: self.peek().to_string(),
            })
        }
    }

    // implies := or ('->' implies)?     (right-associative)
    fn parse_implies(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.parse_or()?;
        if *self.peek() == Token::Implies {
            self.advance();
            let rhs = self.parse_implies()?;
            Ok(Formula::Implies(Box::new(lhs), Box::new(rhs)))
        } else {
            Ok(lhs)
        }
    }

    // or := and ('|' and)*
    fn parse_or(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.parse_and()?;
        while *self.peek() == Token::Or {
            self.advance();
            let rhs = self.parse_and()?;
            lhs = Formula::Or(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    // and := unary ('&' unary)*
    fn parse_and(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.parse_unary()?;
        while *self.peek() == Token::And {
            self.advance();
            let rhs = self.parse_unary()?;
            lhs = Formula::And(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    // unary := ('!' | 'X' | 'G' | 'F') unary | until
    fn parse_unary(&mut self) -> Result<Formula, ParseError> {
        let wrap = match self.peek() {
            Token::Not => Formula::Not as fn(_) -> _,
            Token::Next => Formula::Next as fn(_) -> _,
            Token::Globally => Formula::Globally as fn(_) -> _,
            Token::Finally => Formula::Finally as fn(_) -> _,
            _ => return self.parse_until(),
        };
        self.advance();
        let inner = self.parse_unary()?;
        Ok(wrap(Box::new(inner)))
    }

    // until := primary ('U' primary)*   (left-associative, binds tightest)
    fn parse_until(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.parse_primary()?;
        while *self.peek() == Token::Until {
            self.advance();
            let rhs = self.parse_primary()?;
            lhs = Formula::Until(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    // primary := atom | '(' implies ')'
    fn parse_primary(&mut self) -> Result<Formula, ParseError> {
        match self.peek() {
            Token::Atom(_) => {
                if let Token::Atom(name) = self.advance() {
                    Ok(Formula::Atom(name))
                } else {
                    unreachable!()
                }
            }
            Token::LParen => {
                self.advance();
                let inner = self.parse_implies()?;
                self.expect(Token::RParen, "')'")?;
                Ok(inner)
            }
            _ => Err(ParseError::Unexpected {
                offset: self.offset(),
                expected: "atom or '('",
                found: self.peek().to_string(),
            }),
        }
    }
}

/// Parse a formula from its ASCII syntax.
pub fn parse_formula(input: &str) -> Result<Formula, ParseError> {
    let mut parser = Parser {
        tokens: lex(input)?,
        cursor: 0,
    };
    let formula = parser.parse_implies()?;
    parser.expect(Token::End, "end of input")?;
    Ok(formula)
}

/// Canonical text form of a formula; `parse_formula` round-trips it.
pub fn pretty_print(formula: &Formula) -> String {
    formula.to_string()
}

fn atom_at(trace: &[TraceState], pos: usize, atom: &str) -> Result<bool, EvalError> {
    trace[pos]
        .get(atom)
        .copied()
        .ok_or_else(|| EvalError::UnknownAtom {
            atom: atom.to_string(),
            position: pos,
        })
}

fn eval_at(formula: &Formula, trace: &[TraceState], pos: usize) -> Result<bool, EvalError> {
    Ok(match formula {
        Formula::Atom(name) => atom_at(trace, pos, name)?,
        Formula::Not(inner) => !eval_at(inner, trace, pos)?,
        Formula::And(a, b) => eval_at(a, trace, pos)? && eval_at(b, trace, pos)?,
        Formula::Or(a, b) => eval_at(a, trace, pos)? || eval_at(b, trace, pos)?,
        Formula::Implies(a, b) => !eval_at(a, trace, pos)? || eval_at(b, trace, pos)?,
        // Strong next: false at the final position.
        Formula::Next(inner) => pos + 1 < trace.len() && eval_at(inner, trace, pos + 1)?,
        Formula::Globally(inner) => {
            let mut all = true;
            for i in pos..trace.len() {
                if !eval_at(inner, trace, i)? {
                    all = false;
                    break;
                }
            }
            all
        }
        Formula::Finally(inner) => {
            let mut any = false;
            for i in pos..trace.len() {
                if eval_at(inner, trace, i)? {
                    any = true;
                    break;
                }
            }
            any
        }
        Formula::Until(a, b) => {
            let mut holds = false;
            for k in pos..trace.len() {
                if eval_at(b, trace, k)? {
                    holds = true;
                    break;
                }
                if !eval_at(a, trace, k)? {
                    break;
                }
            }
            holds
        }
    })
}

/// Evaluate `formula` on `trace` at `position` under finite-trace semantics.
///
/// The trace must be non-empty and the position in range; every atom the
/// formula mentions must be present in each visited state.
pub fn eval_formula(
    formula: &Formula,
    trace: &[TraceState],
    position: usize,
) -> Result<bool, EvalError> {
    if trace.is_empty() {
        return Err(EvalError::EmptyTrace);
    }
    if position >= trace.len() {
        return Err(EvalError::PositionOutOfRange {
            position,
            length: trace.len(),
        });
    }
    eval_at(formula, trace, position)
}

/// Rule violation signal: -1.0 if the trace violates the formula (evaluated
/// at the first position), 0.0 if it satisfies it.
pub fn rule_penalty(formula: &Formula, trace: &[TraceState]) -> Result<f64, EvalError> {
    Ok(if eval_formula(formula, trace, 0)? {
        0.0
    } else {
        -1.0
    })
}
