//! The line-oriented grammar format.
//!
//! ```text
//! # comment
//! actions a b l1
//! labels x->a y->a z->b l1->l1
//! nt A:1 C:1 L1:0
//! rule r1 A(v) y C(v)
//! rule r14 L1 l1 bot
//! ```
//!
//! Declarations may appear in any order; they are processed as actions,
//! then labels, then nonterminals, then rules (each group in line order).

use serde::{Deserialize, Serialize};

use super::term::{lex, TokKind, Token};
use super::{Grammar, GrammarBuilder, GrammarError, Term, TermError, TermParser};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DiagnosticKind {
    Syntax,
    UnknownDirective,
    UnknownSymbol,
    ArityMismatch,
    DuplicateRule,
    DuplicateDeclaration,
    UndeclaredLabel,
    UndeclaredAction,
    UnmappedLabel,
    VariableOutOfRange,
    InvalidHead,
    ReservedName,
}

/// A located grammar error. Lines and columns are 1-based.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub line: usize,
    pub column: usize,
    pub kind: DiagnosticKind,
    pub message: String,
}

impl std::fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.column, self.message)
    }
}

struct Line<'a> {
    number: usize,
    /// Column (1-based) where `rest` starts.
    rest_col: usize,
    rest: &'a str,
}

fn diag(
    line: usize,
    column: usize,
    kind: DiagnosticKind,
    message: impl Into<String>,
) -> Diagnostic {
    Diagnostic {
        line,
        column,
        kind,
        message: message.into(),
    }
}

fn term_diag(line: usize, err: &TermError) -> Diagnostic {
    let kind = match err {
        TermError::Syntax { .. } => DiagnosticKind::Syntax,
        TermError::UnknownSymbol { .. } => DiagnosticKind::UnknownSymbol,
        TermError::ArityMismatch { .. } => DiagnosticKind::ArityMismatch,
        TermError::VariableOutOfRange { .. } => DiagnosticKind::VariableOutOfRange,
    };
    let message = err.to_string();
    let message = message
        .split_once(": ")
        .map_or(message.clone(), |(_, m)| m.to_string());
    diag(line, err.column(), kind, message)
}

/// Whitespace-separated words of `text` with their 1-based columns.
fn words(text: &str, offset: usize) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start: Option<(usize, usize)> = None;
    for (col, (byte, c)) in text.char_indices().enumerate() {
        if c.is_whitespace() {
            if let Some((b, cc)) = start.take() {
                out.push((offset + cc + 1, &text[b..byte]));
            }
        } else if start.is_none() {
            start = Some((byte, col));
        }
    }
    if let Some((b, cc)) = start {
        out.push((offset + cc + 1, &text[b..]));
    }
    out
}

/// Parses and validates a grammar. On failure every diagnostic found is
/// returned, ordered by position.
pub fn parse_grammar(text: &str) -> Result<Grammar, Vec<Diagnostic>> {
    let mut diags = Vec::new();
    let mut groups: [Vec<Line<'_>>; 4] = Default::default();

    for (i, raw) in text.lines().enumerate() {
        let number = i + 1;
        let content = raw.split_once('#').map_or(raw, |(c, _)| c);
        let ws = words(content, 0);
        let Some(&(col, directive)) = ws.first() else {
            continue;
        };
        let after = content
            .char_indices()
            .nth(col - 1 + directive.chars().count())
            .map_or(content.len(), |(b, _)| b);
        let line = Line {
            number,
            rest_col: col - 1 + directive.chars().count(),
            rest: &content[after..],
        };
        match directive {
            "actions" => groups[0].push(line),
            "labels" => groups[1].push(line),
            "nt" => groups[2].push(line),
            "rule" => groups[3].push(line),
            other => diags.push(diag(
                number,
                col,
                DiagnosticKind::UnknownDirective,
                format!("unknown directive `{other}`"),
            )),
        }
    }

    let mut b = GrammarBuilder::new();
    let [actions, labels, nts, rules] = groups;

    for line in &actions {
        for (col, name) in words(line.rest, line.rest_col) {
            if b.action(name).is_err() {
                diags.push(diag(
                    line.number,
                    col,
                    DiagnosticKind::DuplicateDeclaration,
                    format!("duplicate action `{name}`"),
                ));
            }
        }
    }

    for line in &labels {
        for (col, item) in words(line.rest, line.rest_col) {
            let Some((name, action)) = item.split_once("->") else {
                diags.push(diag(
                    line.number,
                    col,
                    DiagnosticKind::UnmappedLabel,
                    format!(
                        "label `{item}` is not mapped to an action (expected `{item}->action`)"
                    ),
                ));
                continue;
            };
            match b.label(name, action) {
                Ok(_) => {}
                Err(GrammarError::UndeclaredAction(a)) => diags.push(diag(
                    line.number,
                    col + name.chars().count() + 2,
                    DiagnosticKind::UndeclaredAction,
                    format!("undeclared action `{a}`"),
                )),
                Err(e) => diags.push(diag(
                    line.number,
                    col,
                    DiagnosticKind::DuplicateDeclaration,
                    e.to_string(),
                )),
            }
        }
    }

    for line in &nts {
        for (col, item) in words(line.rest, line.rest_col) {
            let parsed = item
                .split_once(':')
                .and_then(|(n, a)| a.parse::<usize>().ok().map(|a| (n, a)));
            let Some((name, arity)) = parsed.filter(|(n, _)| !n.is_empty()) else {
                diags.push(diag(
                    line.number,
                    col,
                    DiagnosticKind::Syntax,
                    format!("expected `Name:arity`, found `{item}`"),
                ));
                continue;
            };
            match b.nonterminal(name, arity) {
                Ok(_) => {}
                Err(GrammarError::ReservedName(n)) => diags.push(diag(
                    line.number,
                    col,
                    DiagnosticKind::ReservedName,
                    format!("`{n}` is reserved"),
                )),
                Err(e) => diags.push(diag(
                    line.number,
                    col,
                    DiagnosticKind::DuplicateDeclaration,
                    e.to_string(),
                )),
            }
        }
    }

    for line in &rules {
        if let Err(d) = parse_rule(&mut b, line) {
            diags.push(d);
        }
    }

    if diags.is_empty() {
        Ok(b.build())
    } else {
        diags.sort_by_key(|d| (d.line, d.column));
        Err(diags)
    }
}

fn expect_ident(
    toks: &[Token],
    pos: usize,
    end: usize,
    what: &str,
) -> Result<(String, usize), TermError> {
    match toks.get(pos) {
        Some(Token {
            kind: TokKind::Ident(s),
            column,
        }) => Ok((s.clone(), *column)),
        Some(t) => Err(TermError::Syntax {
            column: t.column,
            message: format!("expected {what}"),
        }),
        None => Err(TermError::Syntax {
            column: end,
            message: format!("expected {what}"),
        }),
    }
}

fn parse_rule(b: &mut GrammarBuilder, line: &Line<'_>) -> Result<(), Diagnostic> {
    let n = line.number;
    let end = line.rest_col + line.rest.chars().count() + 1;
    let toks = lex(line.rest, line.rest_col).map_err(|e| term_diag(n, &e))?;

    let (id, id_col) = expect_ident(&toks, 0, end, "a rule id").map_err(|e| term_diag(n, &e))?;
    let (head, head_col) =
        expect_ident(&toks, 1, end, "a rule head").map_err(|e| term_diag(n, &e))?;
    let Some(head_id) = b.grammar().nonterminal_id(&head) else {
        return Err(diag(
            n,
            head_col,
            DiagnosticKind::UnknownSymbol,
            format!("unknown symbol `{head}`"),
        ));
    };
    let arity = b.grammar().nonterminal(head_id).arity();

    // Head arguments: `v` (arity 1) or `v1, ..., vn` in order.
    let mut pos = 2;
    let mut head_vars = Vec::new();
    if matches!(
        toks.get(pos),
        Some(Token {
            kind: TokKind::LParen,
            ..
        })
    ) {
        pos += 1;
        loop {
            match toks.get(pos) {
                Some(Token {
                    kind: TokKind::RParen,
                    ..
                }) if head_vars.is_empty() => {
                    pos += 1;
                    break;
                }
                Some(Token {
                    kind: TokKind::Ident(v),
                    column,
                }) => {
                    head_vars.push((v.clone(), *column));
                    pos += 1;
                }
                Some(t) => {
                    return Err(diag(
                        n,
                        t.column,
                        DiagnosticKind::Syntax,
                        "expected a variable",
                    ))
                }
                None => {
                    return Err(diag(
                        n,
                        end,
                        DiagnosticKind::Syntax,
                        "unterminated rule head",
                    ))
                }
            }
            match toks.get(pos) {
                Some(Token {
                    kind: TokKind::Comma,
                    ..
                }) => pos += 1,
                Some(Token {
                    kind: TokKind::RParen,
                    ..
                }) => {
                    pos += 1;
                    break;
                }
                Some(t) => {
                    return Err(diag(
                        n,
                        t.column,
                        DiagnosticKind::Syntax,
                        "expected `,` or `)`",
                    ))
                }
                None => {
                    return Err(diag(
                        n,
                        end,
                        DiagnosticKind::Syntax,
                        "unterminated rule head",
                    ))
                }
            }
        }
    }
    if head_vars.len() != arity {
        return Err(diag(
            n,
            head_col,
            DiagnosticKind::ArityMismatch,
            format!(
                "`{head}` expects {arity} argument(s), found {}",
                head_vars.len()
            ),
        ));
    }
    for (i, (v, col)) in head_vars.iter().enumerate() {
        let ok = super::variable_index(v) == Some(i) && !(v == "v" && arity > 1);
        if !ok {
            return Err(diag(
                n,
                *col,
                DiagnosticKind::InvalidHead,
                format!("head argument {} must be the variable v{}", i + 1, i + 1),
            ));
        }
    }

    let (label, label_col) =
        expect_ident(&toks, pos, end, "a label").map_err(|e| term_diag(n, &e))?;
    pos += 1;
    if b.grammar().label_id(&label).is_none() {
        return Err(diag(
            n,
            label_col,
            DiagnosticKind::UndeclaredLabel,
            format!("undeclared label `{label}`"),
        ));
    }
    if b.grammar().rule_id(&id).is_some() {
        return Err(diag(
            n,
            id_col,
            DiagnosticKind::DuplicateRule,
            format!("duplicate rule id `{id}`"),
        ));
    }

    let rest = &toks[pos..];
    let mut p = TermParser::new(b.grammar(), rest, Some(arity), end);
    let rhs = p.parse().map_err(|e| term_diag(n, &e))?;
    p.expect_end().map_err(|e| term_diag(n, &e))?;
    b.rule(&id, &head, &label, rhs)
        .map_err(|e| diag(n, id_col, DiagnosticKind::Syntax, e.to_string()))?;
    Ok(())
}

fn render_term(g: &Grammar, t: &Term, arity: usize) -> String {
    match t {
        Term::Var(i) if arity == 1 => {
            debug_assert_eq!(*i, 0);
            "v".into()
        }
        Term::Var(i) => format!("v{}", i + 1),
        Term::Bot => "bot".into(),
        Term::App(nt, args) if args.is_empty() => g.nonterminal(*nt).name().into(),
        Term::App(nt, args) => {
            let inner: Vec<String> = args.iter().map(|a| render_term(g, a, arity)).collect();
            format!("{}({})", g.nonterminal(*nt).name(), inner.join(","))
        }
    }
}

pub(super) fn render(g: &Grammar) -> String {
    let mut out = String::new();
    let actions: Vec<&str> = g.actions().map(|(_, a)| a).collect();
    out.push_str(&format!("actions {}\n", actions.join(" ")));
    let labels: Vec<String> = g
        .labels()
        .map(|(_, l)| format!("{}->{}", l.name(), g.action_name(l.action())))
        .collect();
    out.push_str(&format!("labels {}\n", labels.join(" ")));
    let nts: Vec<String> = g
        .nonterminals()
        .map(|(_, n)| format!("{}:{}", n.name(), n.arity()))
        .collect();
    out.push_str(&format!("nt {}\n", nts.join(" ")));
    for (_, r) in g.rules() {
        let nt = g.nonterminal(r.head());
        let head = match nt.arity() {
            0 => nt.name().to_string(),
            1 => format!("{}(v)", nt.name()),
            k => {
                let vars: Vec<String> = (1..=k).map(|i| format!("v{i}")).collect();
                format!("{}({})", nt.name(), vars.join(","))
            }
        };
        out.push_str(&format!(
            "rule {} {} {} {}\n",
            r.name(),
            head,
            g.label(r.label()).name(),
            render_term(g, r.rhs(), nt.arity())
        ));
    }
    out
}
