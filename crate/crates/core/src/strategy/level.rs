//! Equivalence level realised by a Defender strategy.
//!
//! Attacker picks a side and an enabled rule; Defender may only answer with
//! move pairs the strategy offers. An attack with no offered answer ends
//! the game (level 0 at that node); a position with no enabled rule on
//! either side is never lost. The value at a node is
//! `min over attacks (1 + max over answers (value of the successor))`.

use std::collections::{HashMap, VecDeque};

use super::intensional::{IntensionalStrategy, Strategy};
use super::playset::Node;
use crate::game::{step, EqLevel, Level, MovePair, Side};
use crate::grammar::{Grammar, TermPair};

/// Lower and upper bounds; they differ only where the cap cut the search.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Bounds {
    lo: Level,
    hi: Level,
}

impl Bounds {
    fn exact(l: Level) -> Self {
        Bounds { lo: l, hi: l }
    }
}

fn attacks(g: &Grammar, pos: &TermPair) -> Vec<(Side, crate::grammar::RuleId)> {
    let mut v: Vec<_> = g
        .enabled(&pos.left)
        .iter()
        .map(|&r| (Side::Left, r))
        .collect();
    v.extend(g.enabled(&pos.right).iter().map(|&r| (Side::Right, r)));
    v
}

fn answers(
    g: &Grammar,
    pos: &TermPair,
    side: Side,
    rule: crate::grammar::RuleId,
    m: MovePair,
) -> bool {
    side.rule(m) == rule && crate::game::is_round(g, pos, m)
}

fn eval_tree(g: &Grammar, pos: &TermPair, node: &Node, budget: &mut usize) -> Bounds {
    let atk = attacks(g, pos);
    if atk.is_empty() {
        return Bounds::exact(Level::Infinite);
    }
    if *budget == 0 {
        return Bounds {
            lo: Level::Finite(0),
            hi: Level::Infinite,
        };
    }
    *budget -= 1;
    let mut acc = Bounds::exact(Level::Infinite);
    for (side, rule) in atk {
        let mut best: Option<Bounds> = None;
        for (&m, child) in node
            .children
            .iter()
            .filter(|(m, _)| answers(g, pos, side, rule, **m))
        {
            let b = eval_tree(g, &step(g, pos, m), child, budget);
            best = Some(match best {
                None => b,
                Some(x) => Bounds {
                    lo: x.lo.max(b.lo),
                    hi: x.hi.max(b.hi),
                },
            });
        }
        let v = match best {
            None => Bounds::exact(Level::Finite(0)),
            Some(b) => Bounds {
                lo: b.lo.succ(),
                hi: b.hi.succ(),
            },
        };
        acc = Bounds {
            lo: acc.lo.min(v.lo),
            hi: acc.hi.min(v.hi),
        };
        if acc.hi == Level::Finite(0) {
            break;
        }
    }
    acc
}

/// Positional strategies: explore the positions reachable under the
/// strategy, then compute levels as a decreasing fixpoint.
fn eval_positional(g: &Grammar, p: &TermPair, s: &IntensionalStrategy, cap: usize) -> Bounds {
    let mut index: HashMap<TermPair, usize> = HashMap::from([(p.clone(), 0)]);
    let mut positions = vec![p.clone()];
    // Per position: for each attack, the successor indices of its answers.
    let mut graph: Vec<Option<Vec<Vec<usize>>>> = vec![None];
    let mut queue = VecDeque::from([0usize]);
    while let Some(ix) = queue.pop_front() {
        if positions.len() > cap {
            break;
        }
        let pos = positions[ix].clone();
        let moves = s.moves(g, &pos);
        let mut per_attack = Vec::new();
        for (side, rule) in attacks(g, &pos) {
            let mut succ = Vec::new();
            for &m in moves.iter().filter(|&&m| answers(g, &pos, side, rule, m)) {
                let q = step(g, &pos, m);
                let j = *index.entry(q.clone()).or_insert_with(|| {
                    positions.push(q);
                    graph.push(None);
                    queue.push_back(positions.len() - 1);
                    positions.len() - 1
                });
                succ.push(j);
            }
            per_attack.push(succ);
        }
        graph[ix] = Some(per_attack);
    }

    let level_with = |frontier_survives: bool| -> Level {
        // alive[q]: q has value ≥ n for the current n.
        let mut alive = vec![true; positions.len()];
        let mut n = 0u32;
        loop {
            let next: Vec<bool> = (0..positions.len())
                .map(|q| match &graph[q] {
                    None => frontier_survives,
                    Some(per_attack) => {
                        per_attack.iter().all(|succ| succ.iter().any(|&j| alive[j]))
                    }
                })
                .collect();
            if !next[0] {
                return Level::Finite(n);
            }
            if next == alive {
                return Level::Infinite;
            }
            alive = next;
            n += 1;
        }
    };
    Bounds {
        lo: level_with(false),
        hi: level_with(true),
    }
}

/// `EqLv(p, S)`: the number of rounds Defender survives when restricted to
/// the answers offered by `s`, against an optimal Attacker.
///
/// `cap` bounds the number of strategy nodes (or positions, for intensional
/// strategies) visited; when it cuts the search the result is
/// `AtLeast(lower bound)`.
pub fn strategy_eq_level(g: &Grammar, p: &TermPair, s: &Strategy, cap: usize) -> EqLevel {
    let b = match s {
        Strategy::Finite(set) => {
            let mut budget = cap;
            eval_tree(g, p, &set.root, &mut budget)
        }
        Strategy::Intensional(s) => eval_positional(g, p, s, cap),
    };
    if b.lo == b.hi {
        EqLevel::from_level(b.lo)
    } else {
        match b.lo {
            Level::Finite(n) => EqLevel::AtLeast(n),
            Level::Infinite => EqLevel::Infinite,
        }
    }
}
