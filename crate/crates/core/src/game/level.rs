//! Equivalence levels.
//!
//! `EqLv(p)` is the largest `n` with `p ∈ ∼n`, or infinity when `p` is in
//! every `∼n` (bisimilar). It is computed by signature-based partition
//! refinement on the terms reachable from both sides: after round `r` the
//! blocks are exactly the `∼r` classes, so the round that first separates
//! the two roots gives the level.

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::grammar::{ActionId, Grammar, GroundTerm, TermPair};

/// A point of `ℕ ∪ {∞}`, totally ordered.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Level {
    Finite(u32),
    Infinite,
}

impl Level {
    pub fn succ(self) -> Level {
        match self {
            Level::Finite(n) => Level::Finite(n + 1),
            Level::Infinite => Level::Infinite,
        }
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Level::Finite(n) => write!(f, "{n}"),
            Level::Infinite => f.write_str("∞"),
        }
    }
}

/// Result of an equivalence-level computation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "kebab-case")]
pub enum EqLevel {
    Exact(u32),
    Infinite,
    /// The exploration budget ran out; `∼n` was established for this `n`.
    AtLeast(u32),
}

impl EqLevel {
    pub fn from_level(l: Level) -> Self {
        match l {
            Level::Finite(n) => EqLevel::Exact(n),
            Level::Infinite => EqLevel::Infinite,
        }
    }

    /// The exact level, if the computation was conclusive.
    pub fn level(self) -> Option<Level> {
        match self {
            EqLevel::Exact(n) => Some(Level::Finite(n)),
            EqLevel::Infinite => Some(Level::Infinite),
            EqLevel::AtLeast(_) => None,
        }
    }

    /// A level known to be at most the true one.
    pub fn lower_bound(self) -> Level {
        match self {
            EqLevel::Exact(n) | EqLevel::AtLeast(n) => Level::Finite(n),
            EqLevel::Infinite => Level::Infinite,
        }
    }

    pub fn is_conclusive(self) -> bool {
        !matches!(self, EqLevel::AtLeast(_))
    }
}

impl fmt::Display for EqLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EqLevel::Exact(n) => write!(f, "Exact({n})"),
            EqLevel::Infinite => f.write_str("Infinite"),
            EqLevel::AtLeast(n) => write!(f, "AtLeast({n})"),
        }
    }
}

impl FromStr for EqLevel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s == "Infinite" {
            return Ok(EqLevel::Infinite);
        }
        let num = |inner: &str| {
            inner
                .parse::<u32>()
                .map_err(|e| format!("bad level `{s}`: {e}"))
        };
        if let Some(inner) = s.strip_prefix("Exact(").and_then(|r| r.strip_suffix(')')) {
            return num(inner).map(EqLevel::Exact);
        }
        if let Some(inner) = s.strip_prefix("AtLeast(").and_then(|r| r.strip_suffix(')')) {
            return num(inner).map(EqLevel::AtLeast);
        }
        Err(format!("bad level `{s}`"))
    }
}

/// Reachable fragment of the term LTS, explored breadth-first from a set
/// of roots under a state cap.
struct Fragment {
    /// `None` for states that were discovered but not expanded.
    succ: Vec<Option<Vec<(ActionId, usize)>>>,
    /// Every state at a distance below this from the roots is expanded.
    /// `None` when the exploration closed.
    horizon: Option<u32>,
}

fn explore(g: &Grammar, roots: &[&GroundTerm], budget: usize) -> (Fragment, Vec<usize>) {
    let mut index: HashMap<GroundTerm, usize> = HashMap::new();
    let mut terms: Vec<GroundTerm> = Vec::new();
    let mut dist: Vec<u32> = Vec::new();
    let mut succ: Vec<Option<Vec<(ActionId, usize)>>> = Vec::new();
    let mut queue = VecDeque::new();
    let mut root_ix = Vec::new();
    for &r in roots {
        let ix = *index.entry(r.clone()).or_insert_with(|| {
            terms.push(r.clone());
            dist.push(0);
            succ.push(None);
            queue.push_back(terms.len() - 1);
            terms.len() - 1
        });
        root_ix.push(ix);
    }

    let mut horizon = None;
    while let Some(s) = queue.pop_front() {
        let term = terms[s].clone();
        let moves: Vec<(ActionId, GroundTerm)> = g
            .enabled(&term)
            .iter()
            .map(|&r| (g.action_of(r), g.fire(&term, r)))
            .collect();
        let fresh = {
            let mut seen_new: Vec<&GroundTerm> = Vec::new();
            for (_, t) in &moves {
                if !index.contains_key(t) && !seen_new.contains(&t) {
                    seen_new.push(t);
                }
            }
            seen_new.len()
        };
        if terms.len() + fresh > budget {
            horizon = Some(dist[s]);
            break;
        }
        let mut edges = Vec::with_capacity(moves.len());
        for (a, t) in moves {
            let ix = match index.get(&t) {
                Some(&ix) => ix,
                None => {
                    terms.push(t.clone());
                    dist.push(dist[s] + 1);
                    succ.push(None);
                    index.insert(t, terms.len() - 1);
                    queue.push_back(terms.len() - 1);
                    terms.len() - 1
                }
            };
            edges.push((a, ix));
        }
        edges.sort_unstable();
        edges.dedup();
        succ[s] = Some(edges);
    }
    (Fragment { succ, horizon }, root_ix)
}

#[derive(Clone, PartialEq, Eq, Hash)]
enum Signature {
    Expanded(Vec<(ActionId, u32)>),
    Frontier(usize),
}

/// Computes `EqLv(p)`, exploring at most `budget` distinct terms.
///
/// Exact results are returned when the reachable space closes within the
/// budget, or when the two terms separate before the exploration horizon.
/// Otherwise the result is `AtLeast(n)` with `n` the horizon depth.
pub fn eq_level(g: &Grammar, p: &TermPair, budget: usize) -> EqLevel {
    if p.left == p.right {
        return EqLevel::Infinite;
    }
    let (frag, roots) = explore(g, &[&p.left, &p.right], budget.max(2));
    let (l, r) = (roots[0], roots[1]);
    let n = frag.succ.len();

    let mut block = vec![0u32; n];
    let mut num_blocks = 1usize;
    let mut round = 0u32;
    loop {
        if let Some(h) = frag.horizon {
            if round >= h {
                return EqLevel::AtLeast(h);
            }
        }
        round += 1;
        let mut ids: HashMap<(u32, Signature), u32> = HashMap::new();
        let mut next = vec![0u32; n];
        for s in 0..n {
            let sig = match &frag.succ[s] {
                Some(edges) => {
                    let mut v: Vec<(ActionId, u32)> =
                        edges.iter().map(|&(a, t)| (a, block[t])).collect();
                    v.sort_unstable();
                    v.dedup();
                    Signature::Expanded(v)
                }
                None => Signature::Frontier(s),
            };
            let fresh = ids.len() as u32;
            next[s] = *ids.entry((block[s], sig)).or_insert(fresh);
        }
        block = next;
        if block[l] != block[r] {
            return EqLevel::Exact(round - 1);
        }
        if ids.len() == num_blocks {
            // Stable partition: the roots are never separated.
            return match frag.horizon {
                None => EqLevel::Infinite,
                Some(h) => EqLevel::AtLeast(h),
            };
        }
        num_blocks = ids.len();
    }
}
