//! Ground terms, rule right-hand sides, and the textual term syntax.
//!
//! Terms are finite trees over the grammar's ranked nonterminals plus the
//! constant `bot`. Right-hand sides of rules may additionally mention the
//! variables `v` (shorthand for `v1`) and `v1..vn`.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::{Grammar, NtId};

/// A right-hand side term: may contain variables bound by the rule head.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Term {
    /// Variable `v{i+1}`; stored zero-based.
    Var(usize),
    Bot,
    App(NtId, Vec<Term>),
}

impl Term {
    /// Largest variable index (zero-based) occurring in the term.
    pub fn max_var(&self) -> Option<usize> {
        match self {
            Term::Var(i) => Some(*i),
            Term::Bot => None,
            Term::App(_, args) => args.iter().filter_map(Term::max_var).max(),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Term::Var(_) | Term::Bot => 0,
            Term::App(_, args) if args.is_empty() => 0,
            Term::App(_, args) => 1 + args.iter().map(Term::depth).max().unwrap_or(0),
        }
    }

    /// Substitutes `args[i]` for every `Var(i)`.
    ///
    /// Callers guarantee every variable index is in range.
    pub(crate) fn instantiate(&self, args: &[GroundTerm]) -> GroundTerm {
        match self {
            Term::Var(i) => args[*i].clone(),
            Term::Bot => GroundTerm::Bot,
            Term::App(nt, sub) => {
                GroundTerm::App(*nt, sub.iter().map(|t| t.instantiate(args)).collect())
            }
        }
    }
}

/// An element of the term universe: `bot` or a nonterminal applied to
/// ground arguments.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GroundTerm {
    Bot,
    App(NtId, Vec<GroundTerm>),
}

impl GroundTerm {
    pub fn constant(nt: NtId) -> Self {
        GroundTerm::App(nt, Vec::new())
    }

    pub fn app(nt: NtId, args: impl IntoIterator<Item = GroundTerm>) -> Self {
        GroundTerm::App(nt, args.into_iter().collect())
    }

    pub fn root(&self) -> Option<NtId> {
        match self {
            GroundTerm::Bot => None,
            GroundTerm::App(nt, _) => Some(*nt),
        }
    }

    pub fn size(&self) -> usize {
        match self {
            GroundTerm::Bot => 1,
            GroundTerm::App(_, args) => 1 + args.iter().map(GroundTerm::size).sum::<usize>(),
        }
    }

    pub fn display<'g>(&'g self, g: &'g Grammar) -> impl fmt::Display + 'g {
        DisplayTerm { g, t: self }
    }
}

struct DisplayTerm<'g> {
    g: &'g Grammar,
    t: &'g GroundTerm,
}

impl fmt::Display for DisplayTerm<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.t {
            GroundTerm::Bot => f.write_str("bot"),
            GroundTerm::App(nt, args) => {
                f.write_str(self.g.nonterminal(*nt).name())?;
                if !args.is_empty() {
                    f.write_str("(")?;
                    for (i, a) in args.iter().enumerate() {
                        if i > 0 {
                            f.write_str(",")?;
                        }
                        write!(f, "{}", a.display(self.g))?;
                    }
                    f.write_str(")")?;
                }
                Ok(())
            }
        }
    }
}

/// A game position `(T, T')`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TermPair {
    pub left: GroundTerm,
    pub right: GroundTerm,
}

impl TermPair {
    pub fn new(left: GroundTerm, right: GroundTerm) -> Self {
        TermPair { left, right }
    }

    pub fn swapped(&self) -> Self {
        TermPair::new(self.right.clone(), self.left.clone())
    }

    pub fn display<'g>(&'g self, g: &'g Grammar) -> impl fmt::Display + 'g {
        DisplayPair { g, p: self }
    }

    /// Textual form `[left, right]` as used by the JSON schemas.
    pub fn to_strings(&self, g: &Grammar) -> [String; 2] {
        [
            self.left.display(g).to_string(),
            self.right.display(g).to_string(),
        ]
    }
}

struct DisplayPair<'g> {
    g: &'g Grammar,
    p: &'g TermPair,
}

impl fmt::Display for DisplayPair<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({}, {})",
            self.p.left.display(self.g),
            self.p.right.display(self.g)
        )
    }
}

/// Why a term failed to parse or to check against a grammar.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error, Serialize, Deserialize)]
pub enum TermError {
    #[error("column {column}: syntax error: {message}")]
    Syntax { column: usize, message: String },
    #[error("column {column}: unknown symbol `{symbol}`")]
    UnknownSymbol { column: usize, symbol: String },
    #[error("column {column}: `{symbol}` expects {expected} argument(s), found {found}")]
    ArityMismatch {
        column: usize,
        symbol: String,
        expected: usize,
        found: usize,
    },
    #[error("column {column}: variable `{symbol}` is out of range (head has arity {arity})")]
    VariableOutOfRange {
        column: usize,
        symbol: String,
        arity: usize,
    },
}

impl TermError {
    pub fn column(&self) -> usize {
        match self {
            TermError::Syntax { column, .. }
            | TermError::UnknownSymbol { column, .. }
            | TermError::ArityMismatch { column, .. }
            | TermError::VariableOutOfRange { column, .. } => *column,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum TokKind {
    Ident(String),
    LParen,
    RParen,
    Comma,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct Token {
    pub kind: TokKind,
    /// 1-based character column.
    pub column: usize,
}

pub(crate) fn is_ident_char(c: char) -> bool {
    c.is_alphanumeric() || matches!(c, '_' | '\'' | '′' | '⊥')
}

/// Splits a term-bearing line into tokens. `offset` is added to reported
/// columns so callers can lex a suffix of a longer line.
pub(crate) fn lex(text: &str, offset: usize) -> Result<Vec<Token>, TermError> {
    let mut out = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let column = offset + i + 1;
        match c {
            c if c.is_whitespace() => i += 1,
            '(' => {
                out.push(Token {
                    kind: TokKind::LParen,
                    column,
                });
                i += 1;
            }
            ')' => {
                out.push(Token {
                    kind: TokKind::RParen,
                    column,
                });
                i += 1;
            }
            ',' => {
                out.push(Token {
                    kind: TokKind::Comma,
                    column,
                });
                i += 1;
            }
            c if is_ident_char(c) => {
                let start = i;
                while i < chars.len() && is_ident_char(chars[i]) {
                    i += 1;
                }
                let name: String = chars[start..i].iter().collect();
                out.push(Token {
                    kind: TokKind::Ident(name),
                    column,
                });
            }
            other => {
                return Err(TermError::Syntax {
                    column,
                    message: format!("unexpected character `{other}`"),
                })
            }
        }
    }
    Ok(out)
}

/// Parses a variable name `v` or `vN` (N ≥ 1) into a zero-based index.
pub(crate) fn variable_index(name: &str) -> Option<usize> {
    if name == "v" {
        return Some(0);
    }
    let digits = name.strip_prefix('v')?;
    if digits.is_empty() || !digits.chars().all(|c| c.is_ascii_digit()) || digits.starts_with('0') {
        return None;
    }
    digits.parse::<usize>().ok().map(|n| n - 1)
}

/// Recursive-descent parser over a token slice.
pub(crate) struct TermParser<'a> {
    g: &'a Grammar,
    toks: &'a [Token],
    pos: usize,
    /// Arity of the enclosing rule head when variables are allowed.
    vars: Option<usize>,
    end_column: usize,
}

impl<'a> TermParser<'a> {
    pub fn new(g: &'a Grammar, toks: &'a [Token], vars: Option<usize>, end_column: usize) -> Self {
        TermParser {
            g,
            toks,
            pos: 0,
            vars,
            end_column,
        }
    }

    fn peek(&self) -> Option<&Token> {
        self.toks.get(self.pos)
    }

    fn column(&self) -> usize {
        self.peek().map_or(self.end_column, |t| t.column)
    }

    pub fn parse(&mut self) -> Result<Term, TermError> {
        let column = self.column();
        let name = match self.peek() {
            Some(Token {
                kind: TokKind::Ident(name),
                ..
            }) => name.clone(),
            Some(_) => {
                return Err(TermError::Syntax {
                    column,
                    message: "expected a term".into(),
                })
            }
            None => {
                return Err(TermError::Syntax {
                    column,
                    message: "unexpected end of input, expected a term".into(),
                })
            }
        };
        self.pos += 1;

        if name == "bot" || name == "⊥" {
            return Ok(Term::Bot);
        }
        if let Some(arity) = self.vars {
            if let Some(ix) = variable_index(&name) {
                if ix >= arity {
                    return Err(TermError::VariableOutOfRange {
                        column,
                        symbol: name,
                        arity,
                    });
                }
                return Ok(Term::Var(ix));
            }
        }
        let nt = self
            .g
            .nonterminal_id(&name)
            .ok_or_else(|| TermError::UnknownSymbol {
                column,
                symbol: name.clone(),
            })?;
        let mut args = Vec::new();
        if matches!(
            self.peek(),
            Some(Token {
                kind: TokKind::LParen,
                ..
            })
        ) {
            self.pos += 1;
            if matches!(
                self.peek(),
                Some(Token {
                    kind: TokKind::RParen,
                    ..
                })
            ) {
                self.pos += 1;
            } else {
                loop {
                    args.push(self.parse()?);
                    let column = self.column();
                    match self.peek().map(|t| &t.kind) {
                        Some(TokKind::Comma) => self.pos += 1,
                        Some(TokKind::RParen) => {
                            self.pos += 1;
                            break;
                        }
                        _ => {
                            return Err(TermError::Syntax {
                                column,
                                message: "expected `,` or `)`".into(),
                            })
                        }
                    }
                }
            }
        }
        let expected = self.g.nonterminal(nt).arity();
        if args.len() != expected {
            return Err(TermError::ArityMismatch {
                column,
                symbol: name,
                expected,
                found: args.len(),
            });
        }
        Ok(Term::App(nt, args))
    }

    pub fn expect_end(&self) -> Result<(), TermError> {
        match self.peek() {
            None => Ok(()),
            Some(t) => Err(TermError::Syntax {
                column: t.column,
                message: "trailing input after term".into(),
            }),
        }
    }
}

fn to_ground(t: Term) -> GroundTerm {
    match t {
        Term::Bot => GroundTerm::Bot,
        Term::App(nt, args) => GroundTerm::App(nt, args.into_iter().map(to_ground).collect()),
        Term::Var(_) => unreachable!("ground parser never yields variables"),
    }
}

impl Grammar {
    /// Parses a ground term such as `A(bot)` or `L1` against this grammar.
    pub fn parse_term(&self, text: &str) -> Result<GroundTerm, TermError> {
        let toks = lex(text, 0)?;
        let mut p = TermParser::new(self, &toks, None, text.chars().count() + 1);
        let t = p.parse()?;
        p.expect_end()?;
        Ok(to_ground(t))
    }

    pub fn parse_pair(&self, left: &str, right: &str) -> Result<TermPair, TermError> {
        Ok(TermPair::new(
            self.parse_term(left)?,
            self.parse_term(right)?,
        ))
    }
}
