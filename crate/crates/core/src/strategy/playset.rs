//! Prefix-closed sets of plays, stored as tries keyed by move pairs.

use std::collections::{BTreeMap, VecDeque};
use std::fmt::Write as _;

use crate::game::{DisplayPlay, GameError, MovePair, MovePairSet, Play};
use crate::grammar::{Grammar, RuleId};

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub(crate) struct Node {
    pub(crate) children: BTreeMap<MovePair, Node>,
}

impl Node {
    fn count(&self) -> usize {
        1 + self.children.values().map(Node::count).sum::<usize>()
    }

    fn depth(&self) -> usize {
        self.children
            .values()
            .map(|c| 1 + c.depth())
            .max()
            .unwrap_or(0)
    }

    fn truncated(&self, n: usize) -> Node {
        if n == 0 {
            return Node::default();
        }
        Node {
            children: self
                .children
                .iter()
                .map(|(k, c)| (*k, c.truncated(n - 1)))
                .collect(),
        }
    }

    fn is_subset(&self, other: &Node) -> bool {
        self.children
            .iter()
            .all(|(k, c)| other.children.get(k).is_some_and(|o| c.is_subset(o)))
    }
}

/// A prefix-closed set of plays. Always contains the empty play.
///
/// Structural equality is set equality.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct PlaySet {
    pub(crate) root: Node,
}

impl PlaySet {
    /// `{(ε, ε)}`.
    pub fn new() -> Self {
        Self::default()
    }

    /// Prefix closure of `plays`.
    pub fn from_plays<'a>(plays: impl IntoIterator<Item = &'a Play>) -> Self {
        let mut s = PlaySet::new();
        for p in plays {
            s.insert(p.steps());
        }
        s
    }

    /// Adds `steps` together with all its prefixes.
    pub fn insert(&mut self, steps: &[MovePair]) {
        let mut node = &mut self.root;
        for m in steps {
            node = node.children.entry(*m).or_default();
        }
    }

    pub(crate) fn node(&self, steps: &[MovePair]) -> Option<&Node> {
        let mut node = &self.root;
        for m in steps {
            node = node.children.get(m)?;
        }
        Some(node)
    }

    pub fn contains(&self, alpha: &Play) -> bool {
        self.node(alpha.steps()).is_some()
    }

    /// `{(π, π') | α·(π, π') ∈ S}`, or `None` when `α ∉ S`.
    pub fn moves_after(&self, alpha: &Play) -> Option<MovePairSet> {
        self.node(alpha.steps())
            .map(|n| n.children.keys().copied().collect())
    }

    /// Number of plays, the empty play included.
    pub fn len(&self) -> usize {
        self.root.count()
    }

    /// Never true: the empty play is always present.
    pub fn is_empty(&self) -> bool {
        false
    }

    /// Length of the longest play.
    pub fn depth(&self) -> usize {
        self.root.depth()
    }

    /// All plays in length-lexicographic order.
    pub fn plays(&self) -> Vec<Play> {
        let mut out = Vec::new();
        let mut queue = VecDeque::from([(Vec::new(), &self.root)]);
        while let Some((prefix, node)) = queue.pop_front() {
            for (m, child) in &node.children {
                let mut p: Vec<MovePair> = prefix.clone();
                p.push(*m);
                queue.push_back((p, child));
            }
            out.push(Play(prefix));
        }
        out
    }

    /// Plays with no extension in the set (maximal for the prefix order),
    /// in length-lexicographic order.
    pub fn maximal_plays(&self) -> Vec<Play> {
        self.plays()
            .into_iter()
            .filter(|p| self.node(p.steps()).is_some_and(|n| n.children.is_empty()))
            .collect()
    }

    /// `α \ S = {β | α·β ∈ S}`.
    pub fn residual(&self, alpha: &Play) -> Result<PlaySet, ResidualError> {
        self.node(alpha.steps())
            .map(|n| PlaySet { root: n.clone() })
            .ok_or(ResidualError::NotInSet)
    }

    /// `S ∩ (R×R)^{≤n}`.
    pub fn truncate(&self, n: usize) -> PlaySet {
        PlaySet {
            root: self.root.truncated(n),
        }
    }

    pub fn is_subset(&self, other: &PlaySet) -> bool {
        self.root.is_subset(&other.root)
    }

    /// Removes `α` and all its extensions. Removing the empty play is a
    /// no-op on the root: the result is `{(ε, ε)}`.
    pub fn remove(&mut self, alpha: &Play) -> bool {
        let Some((last, prefix)) = alpha.steps().split_last() else {
            let had = !self.root.children.is_empty();
            self.root.children.clear();
            return had;
        };
        let mut node = &mut self.root;
        for m in prefix {
            match node.children.get_mut(m) {
                Some(n) => node = n,
                None => return false,
            }
        }
        node.children.remove(last).is_some()
    }

    /// Every rule id mentioned by some play.
    pub fn rules(&self) -> Vec<RuleId> {
        let mut out: Vec<RuleId> = self
            .plays()
            .iter()
            .flat_map(|p| p.steps().iter().flat_map(|m| [m.left, m.right]))
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// One maximal play per line, steps as `left:right`. The empty set
    /// `{(ε, ε)}` renders as an empty string.
    pub fn to_lines(&self, g: &Grammar) -> Vec<String> {
        self.maximal_plays()
            .into_iter()
            .filter(|p| !p.is_empty())
            .map(|p| {
                DisplayPlay {
                    g,
                    steps: p.steps(),
                }
                .to_string()
            })
            .collect()
    }

    pub fn to_text(&self, g: &Grammar) -> String {
        let mut out = String::new();
        for line in self.to_lines(g) {
            let _ = writeln!(out, "{line}");
        }
        out
    }

    /// Parses the strategy line format; blank lines and `#` comments are
    /// ignored. The result is the prefix closure of the listed plays.
    pub fn parse(g: &Grammar, text: &str) -> Result<PlaySet, StrategyParseError> {
        let mut plays = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let content = raw.split_once('#').map_or(raw, |(c, _)| c).trim();
            if content.is_empty() {
                continue;
            }
            let play = Play::parse(g, content).map_err(|source| StrategyParseError {
                line: i + 1,
                source,
            })?;
            plays.push(play);
        }
        Ok(PlaySet::from_plays(&plays))
    }

    /// Parses a list of play lines (as used in JSON documents).
    pub fn from_lines<S: AsRef<str>>(
        g: &Grammar,
        lines: &[S],
    ) -> Result<PlaySet, StrategyParseError> {
        let mut plays = Vec::new();
        for (i, l) in lines.iter().enumerate() {
            let play = Play::parse(g, l.as_ref()).map_err(|source| StrategyParseError {
                line: i + 1,
                source,
            })?;
            plays.push(play);
        }
        Ok(PlaySet::from_plays(&plays))
    }

    /// Renders the full set as `{ε, r1:r3, ...}` in length-lex order.
    pub fn display_set(&self, g: &Grammar) -> String {
        let items: Vec<String> = self
            .plays()
            .iter()
            .map(|p| {
                DisplayPlay {
                    g,
                    steps: p.steps(),
                }
                .to_string()
            })
            .collect();
        format!("{{{}}}", items.join(", "))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ResidualError {
    #[error("the play is not in the set")]
    NotInSet,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("line {line}: {source}")]
pub struct StrategyParseError {
    pub line: usize,
    pub source: GameError,
}

/// `S₁ ⊑ S₂`: `S₁ ⊆ S₂` and every play of `S₂ ∖ S₁` extends a play that is
/// maximal in `S₁`.
pub fn extension_leq(s1: &PlaySet, s2: &PlaySet) -> bool {
    fn walk(a: &Node, b: &Node) -> bool {
        if a.children.is_empty() {
            // Maximal in S₁: anything below it in S₂ is allowed.
            return true;
        }
        // A play of S₂ leaving S₁ here would extend a non-maximal element.
        b.children.keys().all(|k| a.children.contains_key(k))
            && a.children
                .iter()
                .all(|(k, c)| b.children.get(k).is_some_and(|d| walk(c, d)))
    }
    walk(&s1.root, &s2.root)
}

/// Composition `S_a⁻¹ ∘ S_b` on the (left word, right word) view of plays:
/// `{(u, w) | ∃v. (v, u) ∈ S_a ∧ (v, w) ∈ S_b}`, prefix-closed.
pub fn indstr(sa: &PlaySet, sb: &PlaySet) -> PlaySet {
    let mut out = PlaySet::new();
    let bs = sb.plays();
    for a in sa.plays() {
        for b in bs.iter().filter(|b| b.len() == a.len()) {
            let same_v = a
                .steps()
                .iter()
                .zip(b.steps())
                .all(|(x, y)| x.left == y.left);
            if same_v {
                let steps: Vec<MovePair> = a
                    .steps()
                    .iter()
                    .zip(b.steps())
                    .map(|(x, y)| MovePair::new(x.right, y.right))
                    .collect();
                out.insert(&steps);
            }
        }
    }
    out
}
