#![allow(dead_code)]

use std::collections::HashMap;

use fog_core::game::{rounds, sim1, EqLevel, MovePair, Play};
use fog_core::grammar::{Grammar, GrammarBuilder, GroundTerm, TermPair};
use fog_core::strategy::PlaySet;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub use rand::SeedableRng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Game value capped at `depth`, by plain min-max over the game tree.
/// Uses only the public single-step API.
pub struct BruteForce<'g> {
    g: &'g Grammar,
    memo: HashMap<(GroundTerm, GroundTerm, u32), u32>,
}

impl<'g> BruteForce<'g> {
    pub fn new(g: &'g Grammar) -> Self {
        BruteForce {
            g,
            memo: HashMap::new(),
        }
    }

    fn moves(&self, t: &GroundTerm) -> Vec<(u32, GroundTerm)> {
        self.g
            .enabled_rules(t)
            .unwrap()
            .into_iter()
            .map(|r| (self.g.act(r).unwrap().0, self.g.apply_rule(t, r).unwrap()))
            .collect()
    }

    pub fn value(&mut self, l: &GroundTerm, r: &GroundTerm, depth: u32) -> u32 {
        if depth == 0 {
            return 0;
        }
        let key = (l.clone(), r.clone(), depth);
        if let Some(&v) = self.memo.get(&key) {
            return v;
        }
        let (ml, mr) = (self.moves(l), self.moves(r));
        let mut best = depth;
        for (attack, answer, flip) in [(&ml, &mr, false), (&mr, &ml, true)] {
            for (a, ta) in attack {
                let mut round = 0;
                for (_, tb) in answer.iter().filter(|(b, _)| b == a) {
                    let v = if flip {
                        self.value(tb, ta, depth - 1)
                    } else {
                        self.value(ta, tb, depth - 1)
                    };
                    round = round.max(1 + v);
                }
                best = best.min(round);
            }
        }
        self.memo.insert(key, best);
        best
    }
}

/// Whether `computed` is consistent with a brute-force value `v` found
/// with cap `depth`.
pub fn agrees(computed: EqLevel, v: u32, depth: u32) -> bool {
    if v < depth {
        computed == EqLevel::Exact(v)
    } else {
        match computed {
            EqLevel::Exact(n) | EqLevel::AtLeast(n) => n >= depth,
            EqLevel::Infinite => true,
        }
    }
}

/// A random grammar over unary nonterminals `N0..` and actions `a`, `b`.
/// Right-hand sides are `v`, `M(v)` or `bot`; with `acyclic` a rule of `Ni`
/// only produces `Nj` for `j > i`, so every game is finite.
pub fn random_grammar(rng: &mut impl Rng, acyclic: bool) -> Grammar {
    let n = rng.gen_range(1..=4usize);
    let mut b = GrammarBuilder::new();
    b.action("a").unwrap();
    b.action("b").unwrap();
    b.label("la", "a").unwrap();
    b.label("lb", "b").unwrap();
    for i in 0..n {
        b.nonterminal(&format!("N{i}"), 1).unwrap();
    }
    let rules = rng.gen_range(1..=10usize);
    for k in 0..rules {
        let head = rng.gen_range(0..n);
        let label = if rng.gen_bool(0.6) { "la" } else { "lb" };
        let targets: Vec<usize> = if acyclic {
            (head + 1..n).collect()
        } else {
            (0..n).collect()
        };
        let rhs = match rng.gen_range(0..3) {
            0 if !targets.is_empty() => format!("N{}(v)", targets.choose(rng).unwrap()),
            1 => "bot".to_string(),
            _ => "v".to_string(),
        };
        b.rule_text(&format!("r{}", k + 1), &format!("N{head}"), label, &rhs)
            .unwrap();
    }
    b.build()
}

pub fn random_term(rng: &mut impl Rng, g: &Grammar, max_depth: usize) -> GroundTerm {
    let n = g.num_nonterminals();
    let d = rng.gen_range(0..=max_depth);
    let mut text = String::from("bot");
    for _ in 0..d {
        text = format!("N{}({text})", rng.gen_range(0..n));
    }
    g.parse_term(&text).unwrap()
}

pub fn random_pair(rng: &mut impl Rng, g: &Grammar, max_depth: usize) -> TermPair {
    TermPair::new(
        random_term(rng, g, max_depth),
        random_term(rng, g, max_depth),
    )
}

/// Grows a Defender play set from `p`: at a position in `∼1` every attack is
/// answered by one randomly chosen same-action response. With `stop_prob`
/// a node in `∼1` may be left without continuations (a quasi-strategy);
/// nodes at `depth` are always leaves.
pub fn random_strategy(
    rng: &mut impl Rng,
    g: &Grammar,
    p: &TermPair,
    depth: usize,
    stop_prob: f64,
) -> PlaySet {
    let mut out = PlaySet::new();
    let mut stack = vec![(Vec::<MovePair>::new(), p.clone())];
    while let Some((alpha, pos)) = stack.pop() {
        if alpha.len() >= depth || !sim1(g, &pos) || rng.gen_bool(stop_prob) {
            out.insert(&alpha);
            continue;
        }
        let all = rounds(g, &pos);
        let mut chosen: Vec<MovePair> = Vec::new();
        for &r in g.enabled(&pos.left) {
            let opts: Vec<_> = all.iter().filter(|m| m.left == r).collect();
            if let Some(&&m) = opts.choose(rng) {
                chosen.push(m);
            }
        }
        for &r in g.enabled(&pos.right) {
            if chosen.iter().any(|m| m.right == r) {
                continue;
            }
            let opts: Vec<_> = all.iter().filter(|m| m.right == r).collect();
            if let Some(&&m) = opts.choose(rng) {
                chosen.push(m);
            }
        }
        chosen.sort();
        chosen.dedup();
        out.insert(&alpha);
        for m in chosen {
            let mut beta = alpha.clone();
            beta.push(m);
            let q = fog_core::game::next(g, &pos, &Play(vec![m])).unwrap();
            stack.push((beta, q));
        }
    }
    out
}
