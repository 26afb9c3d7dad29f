//! The `fog` command line: grammar validation, level queries, strategy
//! checks, the counterexample report, family generation and an interactive
//! game against a machine Defender.

use std::fs;
use std::io::{self, BufRead, Write};
use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use fog_core::game::{eq_level, next, rounds, EqLevel, MovePair, Play, Side};
use fog_core::grammar::{parse_grammar, Diagnostic, Grammar, RuleId, TermPair};
use fog_core::repro::{family_grammar, run_repro};
use fog_core::strategy::{
    check_d, check_dq, check_finite_prefix, check_winning, identity_strategy, materialize, PlaySet,
    StrategyVerdict, VerdictReport,
};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Strategy argument naming the copycat strategy instead of a file.
pub const IDENTITY_STRATEGY: &str = "@identity";

#[derive(Debug, Parser)]
#[command(
    name = "fog",
    version,
    about = "Bisimulation games on first-order grammars"
)]
pub struct Cli {
    /// Print machine-readable JSON.
    #[arg(long, global = true)]
    pub json: bool,
    /// State budget for level computations and play-space exploration.
    #[arg(long, global = true, default_value_t = 100_000)]
    pub budget: usize,
    /// Materialisation depth for the identity strategy.
    #[arg(long, global = true, default_value_t = 16)]
    pub depth: usize,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse a grammar file and report diagnostics.
    Validate { grammar: PathBuf },
    /// Equivalence level of two terms.
    Eqlevel {
        grammar: PathBuf,
        left: String,
        right: String,
    },
    /// Check a strategy file against a position.
    CheckStrategy {
        grammar: PathBuf,
        left: String,
        right: String,
        /// Strategy file, or `@identity` for the copycat strategy.
        strategy: String,
        #[arg(long, value_enum, default_value_t = Mode::Prefix)]
        mode: Mode,
    },
    /// Recompute every claim about the bundled counterexample.
    Repro {
        /// Family parameters, as `LO..HI` or a single number.
        #[arg(long, default_value = "1..6", value_parser = parse_k_range)]
        k_range: RangeInclusive<u32>,
    },
    /// Write the family grammar with chains of length `k` (`-` for stdout).
    GenFamily { k: u32, out: PathBuf },
    /// Play Attacker against a machine Defender.
    Play {
        grammar: PathBuf,
        left: String,
        right: String,
        /// Strategy file, or `@identity`; without it Defender searches.
        strategy: Option<String>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Dq,
    D,
    Winning,
    Prefix,
}

fn parse_k_range(s: &str) -> Result<RangeInclusive<u32>, String> {
    let num = |t: &str| t.trim().parse::<u32>().map_err(|e| format!("`{t}`: {e}"));
    let (lo, hi) = match s.split_once("..") {
        Some((a, b)) => (num(a)?, num(b.trim_start_matches('='))?),
        None => {
            let k = num(s)?;
            (k, k)
        }
    };
    if lo == 0 || lo > hi {
        return Err(format!(
            "`{s}` is not a non-empty range of positive integers"
        ));
    }
    Ok(lo..=hi)
}

/// Exit statuses.
pub const EXIT_OK: i32 = 0;
pub const EXIT_REJECTED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Error)]
enum Failure {
    #[error("{path}: {source}")]
    Read { path: String, source: io::Error },
    #[error("{path}: invalid grammar\n{}", render_diagnostics(.diagnostics))]
    Grammar {
        path: String,
        diagnostics: Vec<Diagnostic>,
    },
    #[error("{0}")]
    Input(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

fn render_diagnostics(ds: &[Diagnostic]) -> String {
    ds.iter()
        .map(|d| format!("  {d}"))
        .collect::<Vec<_>>()
        .join("\n")
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|source| Failure::Read {
        path: path.display().to_string(),
        source,
    })
}

fn load_grammar(path: &Path) -> Result<Grammar, Failure> {
    parse_grammar(&read(path)?).map_err(|diagnostics| Failure::Grammar {
        path: path.display().to_string(),
        diagnostics,
    })
}

fn load_pair(g: &Grammar, left: &str, right: &str) -> Result<TermPair, Failure> {
    g.parse_pair(left, right)
        .map_err(|e| Failure::Input(format!("term: {e}")))
}

fn load_strategy(g: &Grammar, p: &TermPair, arg: &str, depth: usize) -> Result<PlaySet, Failure> {
    if arg == IDENTITY_STRATEGY {
        if p.left != p.right {
            return Err(Failure::Input("@identity needs two identical terms".into()));
        }
        return Ok(materialize(g, &identity_strategy(&p.left), depth));
    }
    let path = Path::new(arg);
    PlaySet::parse(g, &read(path)?).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn emit_json<W: Write>(out: &mut W, v: &impl Serialize) -> io::Result<()> {
    serde_json::to_writer_pretty(&mut *out, v)?;
    writeln!(out)
}

#[derive(Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidateReport {
    pub valid: bool,
    pub nonterminals: usize,
    pub rules: usize,
    pub diagnostics: Vec<Diagnostic>,
}

#[derive(Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelReport {
    pub pair: [String; 2],
    pub level: EqLevel,
}

#[derive(Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Outcome {
    /// Defender had no answer.
    AttackerWins,
    /// No rule is enabled on either side.
    DeadPosition,
    /// The session ended before a winner was decided.
    Abandoned,
}

#[derive(Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlayReport {
    pub outcome: Outcome,
    pub rounds: usize,
    pub play: String,
    pub position: [String; 2],
}

/// Runs one command, writing results to `out` and errors to `err`, and
/// returns the exit status. `input` feeds the interactive game.
pub fn dispatch<R: BufRead, W: Write, E: Write>(
    cli: &Cli,
    input: R,
    out: &mut W,
    err: &mut E,
) -> i32 {
    match run(cli, input, out) {
        Ok(code) => code,
        Err(Failure::Io(e)) if e.kind() == io::ErrorKind::BrokenPipe => EXIT_OK,
        Err(f) => {
            let _ = writeln!(err, "error: {f}");
            EXIT_USAGE
        }
    }
}

fn run<R: BufRead, W: Write>(cli: &Cli, input: R, out: &mut W) -> Result<i32, Failure> {
    match &cli.command {
        Command::Validate { grammar } => {
            let text = read(grammar)?;
            let report = match parse_grammar(&text) {
                Ok(g) => ValidateReport {
                    valid: true,
                    nonterminals: g.num_nonterminals(),
                    rules: g.num_rules(),
                    diagnostics: Vec::new(),
                },
                Err(diagnostics) => ValidateReport {
                    valid: false,
                    nonterminals: 0,
                    rules: 0,
                    diagnostics,
                },
            };
            if cli.json {
                emit_json(out, &report)?;
            } else if report.valid {
                writeln!(
                    out,
                    "ok: {} nonterminals, {} rules",
                    report.nonterminals, report.rules
                )?;
            } else {
                for d in &report.diagnostics {
                    writeln!(out, "{}:{d}", grammar.display())?;
                }
            }
            Ok(if report.valid { EXIT_OK } else { EXIT_REJECTED })
        }
        Command::Eqlevel {
            grammar,
            left,
            right,
        } => {
            let g = load_grammar(grammar)?;
            let p = load_pair(&g, left, right)?;
            let level = eq_level(&g, &p, cli.budget);
            if cli.json {
                emit_json(
                    out,
                    &LevelReport {
                        pair: p.to_strings(&g),
                        level,
                    },
                )?;
            } else {
                writeln!(out, "{level}")?;
            }
            Ok(EXIT_OK)
        }
        Command::CheckStrategy {
            grammar,
            left,
            right,
            strategy,
            mode,
        } => {
            let g = load_grammar(grammar)?;
            let p = load_pair(&g, left, right)?;
            let s = load_strategy(&g, &p, strategy, cli.depth)?;
            let v: StrategyVerdict = match mode {
                Mode::Dq => check_dq(&g, &p, &s),
                Mode::D => check_d(&g, &p, &s),
                Mode::Prefix => check_finite_prefix(&g, &p, &s),
                Mode::Winning => check_winning(&g, &p, &s, cli.budget)
                    .map_err(|e| Failure::Input(e.to_string()))?,
            };
            let report = v.report(&g);
            if cli.json {
                emit_json(out, &report)?;
            } else {
                writeln!(out, "{}", verdict_line(&report))?;
            }
            Ok(if v.accepted { EXIT_OK } else { EXIT_REJECTED })
        }
        Command::Repro { k_range } => {
            let report = run_repro(cli.budget, k_range.clone());
            if cli.json {
                emit_json(out, &report)?;
            } else {
                for c in &report.claims {
                    write!(
                        out,
                        "[{}] {}: {} (expected {}, computed {})",
                        if c.pass { "PASS" } else { "FAIL" },
                        c.id,
                        c.description,
                        c.expected,
                        c.computed
                    )?;
                    match &c.witness {
                        Some(w) => writeln!(out, " witness {w}")?,
                        None => writeln!(out)?,
                    }
                }
                let failed = report.claims.iter().filter(|c| !c.pass).count();
                writeln!(out, "{} claims, {failed} failed", report.claims.len())?;
            }
            Ok(if report.all_pass {
                EXIT_OK
            } else {
                EXIT_REJECTED
            })
        }
        Command::GenFamily { k, out: path } => {
            let g = family_grammar(*k).map_err(|e| Failure::Input(e.to_string()))?;
            let text = g.to_dsl();
            if path.as_os_str() == "-" {
                out.write_all(text.as_bytes())?;
            } else {
                fs::write(path, text).map_err(|source| Failure::Read {
                    path: path.display().to_string(),
                    source,
                })?;
                if cli.json {
                    emit_json(
                        out,
                        &serde_json::json!({ "k": k, "rules": g.num_rules(), "path": path }),
                    )?;
                } else {
                    writeln!(out, "wrote {} ({} rules)", path.display(), g.num_rules())?;
                }
            }
            Ok(EXIT_OK)
        }
        Command::Play {
            grammar,
            left,
            right,
            strategy,
        } => {
            let g = load_grammar(grammar)?;
            let p = load_pair(&g, left, right)?;
            let s = match strategy {
                Some(arg) => {
                    let s = load_strategy(&g, &p, arg, cli.depth)?;
                    let v = check_dq(&g, &p, &s);
                    if !v.accepted {
                        return Err(Failure::Input(format!(
                            "strategy is not a quasi-strategy here: {}",
                            verdict_line(&v.report(&g))
                        )));
                    }
                    Some(s)
                }
                None => None,
            };
            let report = game_repl(&g, &p, s.as_ref(), cli.budget, input, out, !cli.json)?;
            if cli.json {
                emit_json(out, &report)?;
            }
            Ok(EXIT_OK)
        }
    }
}

fn verdict_line(r: &VerdictReport) -> String {
    if r.accepted {
        match r.depth {
            Some(n) => format!("accepted, n={n}"),
            None => "accepted".into(),
        }
    } else {
        format!(
            "rejected: {} violated at {}",
            r.violated_condition.map_or("?".into(), |c| c.to_string()),
            r.witness.as_deref().unwrap_or("ε")
        )
    }
}

fn parse_attack(g: &Grammar, pos: &TermPair, line: &str) -> Result<(Side, RuleId), String> {
    let mut words = line.split_whitespace();
    let side = match words.next().map(str::to_ascii_lowercase).as_deref() {
        Some("l" | "left") => Side::Left,
        Some("r" | "right") => Side::Right,
        _ => return Err("expected `L <rule>`, `R <rule>` or `q`".into()),
    };
    let name = words.next().ok_or("missing rule name")?;
    if words.next().is_some() {
        return Err("trailing input".into());
    }
    let rule = g
        .rule_id(name)
        .ok_or_else(|| format!("unknown rule `{name}`"))?;
    if !g.is_enabled(side.of(pos), rule) {
        return Err(format!(
            "{name} is not enabled on the {} term",
            side_name(side)
        ));
    }
    Ok((side, rule))
}

fn side_name(s: Side) -> &'static str {
    match s {
        Side::Left => "left",
        Side::Right => "right",
    }
}

/// Defender's answer: the first matching move of `s` after `alpha`, or
/// without a strategy the legal answer whose successor has the highest
/// level (first on ties).
fn defend(
    g: &Grammar,
    pos: &TermPair,
    s: Option<&PlaySet>,
    alpha: &Play,
    side: Side,
    rule: RuleId,
    budget: usize,
) -> Option<MovePair> {
    let matches = |m: &MovePair| side.rule(*m) == rule;
    match s {
        Some(s) => s.moves_after(alpha)?.into_iter().find(|m| matches(m)),
        None => {
            let mut best: Option<(EqLevel, MovePair)> = None;
            for m in rounds(g, pos).into_iter().filter(matches) {
                let q = next(g, pos, &Play(vec![m])).ok()?;
                let lv = eq_level(g, &q, budget);
                if best.is_none_or(|(b, _)| rank(lv) > rank(b)) {
                    best = Some((lv, m));
                }
            }
            best.map(|(_, m)| m)
        }
    }
}

fn rank(l: EqLevel) -> (u8, u32) {
    match l {
        EqLevel::Infinite => (2, 0),
        EqLevel::AtLeast(n) => (1, n),
        EqLevel::Exact(n) => (0, n),
    }
}

/// The interactive game. The human attacks with lines `L <rule>` or
/// `R <rule>`; `q` or end of input stops the session.
pub fn game_repl<R: BufRead, W: Write>(
    g: &Grammar,
    p: &TermPair,
    s: Option<&PlaySet>,
    budget: usize,
    input: R,
    out: &mut W,
    verbose: bool,
) -> io::Result<PlayReport> {
    let mut pos = p.clone();
    let mut alpha = Play::empty();
    let mut lines = input.lines();
    let names = |rs: &[RuleId]| -> String {
        if rs.is_empty() {
            "-".into()
        } else {
            rs.iter()
                .map(|&r| g.rule_name(r))
                .collect::<Vec<_>>()
                .join(" ")
        }
    };
    let report = |outcome, alpha: &Play, pos: &TermPair| PlayReport {
        outcome,
        rounds: alpha.len(),
        play: alpha.display(g).to_string(),
        position: pos.to_strings(g),
    };
    loop {
        let (l, r) = (g.enabled(&pos.left), g.enabled(&pos.right));
        if verbose {
            writeln!(
                out,
                "position {} after {} rounds",
                pos.display(g),
                alpha.len()
            )?;
        }
        if l.is_empty() && r.is_empty() {
            if verbose {
                writeln!(
                    out,
                    "no rule is enabled: Defender survives {} rounds",
                    alpha.len()
                )?;
            }
            return Ok(report(Outcome::DeadPosition, &alpha, &pos));
        }
        if verbose {
            writeln!(out, "  left:  {}", names(l))?;
            writeln!(out, "  right: {}", names(r))?;
        }
        let (side, rule) = loop {
            if verbose {
                write!(out, "attack> ")?;
                out.flush()?;
            }
            let Some(line) = lines.next().transpose()? else {
                if verbose {
                    writeln!(out)?;
                    writeln!(out, "session ended after {} rounds", alpha.len())?;
                }
                return Ok(report(Outcome::Abandoned, &alpha, &pos));
            };
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if matches!(line, "q" | "quit" | "exit") {
                if verbose {
                    writeln!(out, "session ended after {} rounds", alpha.len())?;
                }
                return Ok(report(Outcome::Abandoned, &alpha, &pos));
            }
            match parse_attack(g, &pos, line) {
                Ok(a) => break a,
                Err(e) => {
                    if verbose {
                        writeln!(out, "illegal move: {e}")?;
                    }
                }
            }
        };
        match defend(g, &pos, s, &alpha, side, rule, budget) {
            None => {
                if verbose {
                    writeln!(
                        out,
                        "Defender cannot answer {} on the {}: Attacker wins in round {}",
                        g.rule_name(rule),
                        side_name(side),
                        alpha.len() + 1
                    )?;
                }
                return Ok(report(Outcome::AttackerWins, &alpha, &pos));
            }
            Some(m) => {
                let answer = side.other().rule(m);
                pos = next(g, &pos, &Play(vec![m])).expect("answer is a legal round");
                alpha = alpha.then(m);
                if verbose {
                    writeln!(
                        out,
                        "Defender answers {} -> {}",
                        g.rule_name(answer),
                        pos.display(g)
                    )?;
                }
            }
        }
    }
}
