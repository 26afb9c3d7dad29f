//! Strategies given by a rule rather than by a finite set of plays.

use std::fmt;
use std::sync::Arc;

use super::playset::{Node, PlaySet};
use crate::game::{is_round, step, MovePair};
use crate::grammar::{Grammar, GroundTerm, TermPair};

type Generator = dyn Fn(&Grammar, &TermPair) -> Vec<MovePair> + Send + Sync;

/// A positional Defender strategy: a base position and a generator giving
/// the move pairs to play at any position.
#[derive(Clone)]
pub struct IntensionalStrategy {
    pub base: TermPair,
    name: String,
    generator: Arc<Generator>,
}

impl IntensionalStrategy {
    pub fn new(
        name: impl Into<String>,
        base: TermPair,
        generator: impl Fn(&Grammar, &TermPair) -> Vec<MovePair> + Send + Sync + 'static,
    ) -> Self {
        IntensionalStrategy {
            base,
            name: name.into(),
            generator: Arc::new(generator),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Move pairs at `pos`, restricted to legal rounds and in rule order.
    pub fn moves(&self, g: &Grammar, pos: &TermPair) -> Vec<MovePair> {
        let mut v: Vec<MovePair> = (self.generator)(g, pos)
            .into_iter()
            .filter(|&m| is_round(g, pos, m))
            .collect();
        v.sort_unstable();
        v.dedup();
        v
    }
}

impl fmt::Debug for IntensionalStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("IntensionalStrategy")
            .field("name", &self.name)
            .field("base", &self.base)
            .finish_non_exhaustive()
    }
}

/// The copycat strategy on `(t, t)`: every rule is answered by itself.
pub fn identity_strategy(t: &GroundTerm) -> IntensionalStrategy {
    IntensionalStrategy::new("identity", TermPair::new(t.clone(), t.clone()), |g, pos| {
        g.enabled(&pos.left)
            .iter()
            .filter(|&&r| g.is_enabled(&pos.right, r))
            .map(|&r| MovePair::new(r, r))
            .collect()
    })
}

/// The plays of `s` from its base position of length at most `depth`.
pub fn materialize(g: &Grammar, s: &IntensionalStrategy, depth: usize) -> PlaySet {
    fn grow(g: &Grammar, s: &IntensionalStrategy, pos: &TermPair, node: &mut Node, left: usize) {
        if left == 0 {
            return;
        }
        for m in s.moves(g, pos) {
            let child = node.children.entry(m).or_default();
            grow(g, s, &step(g, pos, m), child, left - 1);
        }
    }
    let mut out = PlaySet::new();
    grow(g, s, &s.base, &mut out.root, depth);
    out
}

/// Either representation of a Defender strategy.
#[derive(Clone, Debug)]
pub enum Strategy {
    Finite(PlaySet),
    Intensional(IntensionalStrategy),
}

impl Strategy {
    pub fn as_finite(&self) -> Option<&PlaySet> {
        match self {
            Strategy::Finite(s) => Some(s),
            Strategy::Intensional(_) => None,
        }
    }

    /// A finite view: the set itself, or the materialisation to `depth`.
    pub fn to_playset(&self, g: &Grammar, depth: usize) -> PlaySet {
        match self {
            Strategy::Finite(s) => s.clone(),
            Strategy::Intensional(s) => materialize(g, s, depth),
        }
    }
}

impl From<PlaySet> for Strategy {
    fn from(s: PlaySet) -> Self {
        Strategy::Finite(s)
    }
}

impl From<IntensionalStrategy> for Strategy {
    fn from(s: IntensionalStrategy) -> Self {
        Strategy::Intensional(s)
    }
}
