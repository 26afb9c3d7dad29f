//! Checkers for Defender quasi-strategies, strategies, winning strategies
//! and finite strategy prefixes.
//!
//! All checks walk the trie breadth-first with children in rule order, so
//! a reported witness is the length-lexicographically least violating play.

use std::collections::VecDeque;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::playset::{Node, PlaySet};
use crate::game::{covers, is_round, rounds, sim1, step, DisplayPlay, MovePair, Play};
use crate::grammar::{Grammar, TermPair};

/// The condition a play set failed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Condition {
    /// Contains the empty play.
    #[serde(rename = "DQ1")]
    Dq1,
    /// Prefix-closed.
    #[serde(rename = "DQ2")]
    Dq2,
    /// Every play is legal from the initial position.
    #[serde(rename = "DQ3")]
    Dq3,
    /// Quasi-strategy answering condition.
    #[serde(rename = "DQ4")]
    Dq4,
    /// Strategy answering condition.
    #[serde(rename = "DQ'4")]
    Dq4Strategy,
    /// Winning-strategy answering condition.
    #[serde(rename = "DQ''4")]
    Dq4Winning,
    /// Dead end of a finite prefix that is neither at full depth nor at a
    /// position outside `∼1`.
    #[serde(rename = "CHAR-2")]
    Char2,
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Condition::Dq1 => "DQ1",
            Condition::Dq2 => "DQ2",
            Condition::Dq3 => "DQ3",
            Condition::Dq4 => "DQ4",
            Condition::Dq4Strategy => "DQ'4",
            Condition::Dq4Winning => "DQ''4",
            Condition::Char2 => "CHAR-2",
        })
    }
}

/// Outcome of a strategy check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StrategyVerdict {
    pub accepted: bool,
    pub violated_condition: Option<Condition>,
    pub witness: Option<Play>,
    /// Length of the longest play, reported by the finite-prefix check.
    pub depth: Option<usize>,
}

impl StrategyVerdict {
    pub fn accept() -> Self {
        StrategyVerdict {
            accepted: true,
            violated_condition: None,
            witness: None,
            depth: None,
        }
    }

    pub fn reject(cond: Condition, witness: Play) -> Self {
        StrategyVerdict {
            accepted: false,
            violated_condition: Some(cond),
            witness: Some(witness),
            depth: None,
        }
    }

    pub fn report(&self, g: &Grammar) -> VerdictReport {
        VerdictReport {
            accepted: self.accepted,
            violated_condition: self.violated_condition,
            witness: self.witness.as_ref().map(|w| {
                DisplayPlay {
                    g,
                    steps: w.steps(),
                }
                .to_string()
            }),
            depth: self.depth,
        }
    }
}

/// JSON form of a [`StrategyVerdict`], with the witness in step syntax.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerdictReport {
    pub accepted: bool,
    pub violated_condition: Option<Condition>,
    pub witness: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub depth: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum StrategyError {
    #[error("the play space from the initial position exceeds {cap} plays")]
    PlaySpaceExceeded { cap: usize },
}

/// Breadth-first over `(play, trie node, position)`; returns the first play
/// at which `bad` holds.
fn first_node_where(
    g: &Grammar,
    p: &TermPair,
    s: &PlaySet,
    mut bad: impl FnMut(&TermPair, &Node, usize) -> bool,
) -> Option<Play> {
    let mut queue = VecDeque::from([(Vec::<MovePair>::new(), &s.root, p.clone())]);
    while let Some((alpha, node, pos)) = queue.pop_front() {
        if bad(&pos, node, alpha.len()) {
            return Some(Play(alpha));
        }
        for (m, child) in &node.children {
            let mut beta = alpha.clone();
            beta.push(*m);
            queue.push_back((beta, child, step(g, &pos, *m)));
        }
    }
    None
}

/// DQ1–DQ3. DQ1 and DQ2 hold for every [`PlaySet`] by construction; DQ3
/// is checked play by play.
fn check_plays(g: &Grammar, p: &TermPair, s: &PlaySet) -> Option<StrategyVerdict> {
    let mut queue = VecDeque::from([(Vec::<MovePair>::new(), &s.root, p.clone())]);
    while let Some((alpha, node, pos)) = queue.pop_front() {
        for (m, child) in &node.children {
            let mut beta = alpha.clone();
            beta.push(*m);
            if !is_round(g, &pos, *m) {
                return Some(StrategyVerdict::reject(Condition::Dq3, Play(beta)));
            }
            queue.push_back((beta, child, step(g, &pos, *m)));
        }
    }
    None
}

fn answers_all(g: &Grammar, pos: &TermPair, node: &Node) -> bool {
    covers(g, node.children.keys().copied(), pos)
}

fn check_with(
    g: &Grammar,
    p: &TermPair,
    s: &PlaySet,
    cond: Condition,
    ok_at: impl Fn(&TermPair, &Node) -> bool,
) -> StrategyVerdict {
    if let Some(v) = check_plays(g, p, s) {
        return v;
    }
    match first_node_where(g, p, s, |pos, node, _| !ok_at(pos, node)) {
        Some(alpha) => StrategyVerdict::reject(cond, alpha),
        None => StrategyVerdict::accept(),
    }
}

/// Defender quasi-strategy: at every play either the set stops, or the
/// position is outside `∼1`, or the continuations answer every attack.
pub fn check_dq(g: &Grammar, p: &TermPair, s: &PlaySet) -> StrategyVerdict {
    check_with(g, p, s, Condition::Dq4, |pos, node| {
        node.children.is_empty() || !sim1(g, pos) || answers_all(g, pos, node)
    })
}

/// Defender strategy: may only stop at positions outside `∼1`.
pub fn check_d(g: &Grammar, p: &TermPair, s: &PlaySet) -> StrategyVerdict {
    check_with(g, p, s, Condition::Dq4Strategy, |pos, node| {
        !sim1(g, pos) || answers_all(g, pos, node)
    })
}

/// Winning Defender strategy: every position is in `∼1` and every attack
/// is answered. Since the set is finite this requires the whole play space
/// from `p` to be finite; it is explored first, up to `cap` plays.
pub fn check_winning(
    g: &Grammar,
    p: &TermPair,
    s: &PlaySet,
    cap: usize,
) -> Result<StrategyVerdict, StrategyError> {
    let mut count = 0usize;
    let mut stack = vec![p.clone()];
    while let Some(pos) = stack.pop() {
        count += 1;
        if count > cap {
            return Err(StrategyError::PlaySpaceExceeded { cap });
        }
        for m in rounds(g, &pos) {
            stack.push(step(g, &pos, m));
        }
    }
    Ok(check_with(g, p, s, Condition::Dq4Winning, |pos, node| {
        sim1(g, pos) && answers_all(g, pos, node)
    }))
}

/// Decides whether `s` is a finite prefix `S' ∩ (R×R)^{≤n}` of some
/// Defender strategy `S'`: it must be a quasi-strategy, and every dead end
/// must sit at the maximal depth `n` or at a position outside `∼1`.
pub fn check_finite_prefix(g: &Grammar, p: &TermPair, s: &PlaySet) -> StrategyVerdict {
    let v = check_dq(g, p, s);
    if !v.accepted {
        return v;
    }
    let n = s.depth();
    let dead_end = first_node_where(g, p, s, |pos, node, len| {
        node.children.is_empty() && len != n && sim1(g, pos)
    });
    match dead_end {
        Some(beta) => StrategyVerdict::reject(Condition::Char2, beta),
        None => StrategyVerdict {
            depth: Some(n),
            ..StrategyVerdict::accept()
        },
    }
}
