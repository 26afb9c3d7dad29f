//! The bisimulation game on ground terms.
//!
//! A round is a pair of rules `(π, π')`: Attacker fires a rule on one side,
//! Defender answers on the other side with a rule of the same action. A
//! [`Play`] is a sequence of such rounds.

mod level;

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::grammar::{Grammar, GroundTerm, RuleId, TermPair};

pub use level::{eq_level, EqLevel, Level};

/// One round of the game: the left and right rules fired.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MovePair {
    pub left: RuleId,
    pub right: RuleId,
}

impl MovePair {
    pub fn new(left: RuleId, right: RuleId) -> Self {
        MovePair { left, right }
    }
}

/// Finite set of move pairs.
pub type MovePairSet = std::collections::BTreeSet<MovePair>;

/// A sequence of rounds, `α ∈ (R×R)*`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Play(pub Vec<MovePair>);

impl Play {
    pub fn empty() -> Self {
        Play(Vec::new())
    }

    pub fn steps(&self) -> &[MovePair] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn then(&self, step: MovePair) -> Play {
        let mut v = self.0.clone();
        v.push(step);
        Play(v)
    }

    /// Renders as `r1:r3 r5:r6`; the empty play renders as `ε`.
    pub fn display<'g>(&'g self, g: &'g Grammar) -> impl fmt::Display + 'g {
        DisplayPlay { g, steps: &self.0 }
    }

    /// Parses the step syntax `r1:r3 r5:r6`. Blank text is the empty play.
    pub fn parse(g: &Grammar, text: &str) -> Result<Play, GameError> {
        let text = text.trim();
        if text == "ε" {
            return Ok(Play::empty());
        }
        text.split_whitespace()
            .map(|step| {
                let (l, r) = step
                    .split_once(':')
                    .ok_or_else(|| GameError::MalformedStep(step.to_string()))?;
                let rule = |name: &str| {
                    g.rule_id(name)
                        .ok_or_else(|| GameError::UnknownRule(name.to_string()))
                };
                Ok(MovePair::new(rule(l)?, rule(r)?))
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Play)
    }
}

impl From<Vec<MovePair>> for Play {
    fn from(v: Vec<MovePair>) -> Self {
        Play(v)
    }
}

pub(crate) struct DisplayPlay<'g> {
    pub g: &'g Grammar,
    pub steps: &'g [MovePair],
}

impl fmt::Display for DisplayPlay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.steps.is_empty() {
            return f.write_str("ε");
        }
        for (i, m) in self.steps.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(
                f,
                "{}:{}",
                self.g.rule_name(m.left),
                self.g.rule_name(m.right)
            )?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum GameError {
    #[error("step {index} of the play is not a legal round from the current position")]
    NotAPlay { index: usize },
    #[error("move pair ({left}, {right}) pairs rules with different actions")]
    ActionMismatch { left: String, right: String },
    #[error("unknown rule `{0}`")]
    UnknownRule(String),
    #[error("malformed step `{0}`, expected `left:right`")]
    MalformedStep(String),
}

/// Which side Attacker fires on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn of(self, p: &TermPair) -> &GroundTerm {
        match self {
            Side::Left => &p.left,
            Side::Right => &p.right,
        }
    }

    pub fn other(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }

    /// Projects the rule this side fires in `m`.
    pub fn rule(self, m: MovePair) -> RuleId {
        match self {
            Side::Left => m.left,
            Side::Right => m.right,
        }
    }
}

/// Whether `(π, π')` is a legal round at `p`: both rules enabled on their
/// side and carrying the same action.
pub fn is_round(g: &Grammar, p: &TermPair, m: MovePair) -> bool {
    g.is_enabled(&p.left, m.left)
        && g.is_enabled(&p.right, m.right)
        && g.action_of(m.left) == g.action_of(m.right)
}

/// Position reached by a legal round.
pub(crate) fn step(g: &Grammar, p: &TermPair, m: MovePair) -> TermPair {
    TermPair::new(g.fire(&p.left, m.left), g.fire(&p.right, m.right))
}

/// All legal rounds at `p`, ordered by `(left, right)` rule index.
pub fn rounds(g: &Grammar, p: &TermPair) -> Vec<MovePair> {
    let mut out = Vec::new();
    for &l in g.enabled(&p.left) {
        for &r in g.enabled(&p.right) {
            if g.action_of(l) == g.action_of(r) {
                out.push(MovePair::new(l, r));
            }
        }
    }
    out
}

/// Whether `α` is a play from `p`, i.e. `α ∈ PLAYS(p)`.
pub fn is_play(g: &Grammar, p: &TermPair, alpha: &Play) -> bool {
    next(g, p, alpha).is_ok()
}

/// `NEXT(p, α)`: the position after playing `α` from `p`.
pub fn next(g: &Grammar, p: &TermPair, alpha: &Play) -> Result<TermPair, GameError> {
    let mut cur = p.clone();
    for (index, &m) in alpha.0.iter().enumerate() {
        if !is_round(g, &cur, m) {
            return Err(GameError::NotAPlay { index });
        }
        cur = step(g, &cur, m);
    }
    Ok(cur)
}

/// Level-1 equivalence: both sides enable the same set of actions.
pub fn sim1(g: &Grammar, p: &TermPair) -> bool {
    g.enabled_actions(&p.left) == g.enabled_actions(&p.right)
}

/// Whether `m` answers every attack at `p`: each rule enabled on the left
/// is paired in `m` with some rule enabled on the right, and vice versa.
pub fn full_for(g: &Grammar, m: &MovePairSet, p: &TermPair) -> Result<bool, GameError> {
    if let Some(bad) = m
        .iter()
        .find(|mp| g.action_of(mp.left) != g.action_of(mp.right))
    {
        return Err(GameError::ActionMismatch {
            left: g.rule_name(bad.left).to_string(),
            right: g.rule_name(bad.right).to_string(),
        });
    }
    Ok(covers(g, m.iter().copied(), p))
}

/// Two-sided coverage test over an arbitrary iterator of move pairs whose
/// actions are known to agree.
pub(crate) fn covers(g: &Grammar, m: impl Iterator<Item = MovePair> + Clone, p: &TermPair) -> bool {
    let left_ok = g.enabled(&p.left).iter().all(|&l| {
        m.clone()
            .any(|mp| mp.left == l && g.is_enabled(&p.right, mp.right))
    });
    let right_ok = g.enabled(&p.right).iter().all(|&r| {
        m.clone()
            .any(|mp| mp.right == r && g.is_enabled(&p.left, mp.left))
    });
    left_ok && right_ok
}

/// The stratified equivalence `p ∈ ∼n`.
///
/// `∼0` relates everything; `p ∈ ∼(n+1)` iff every attack on either side
/// has a same-action answer leading into `∼n`.
pub fn strat_equiv(g: &Grammar, p: &TermPair, n: u32) -> bool {
    let mut memo = HashMap::new();
    strat_rec(g, p, n, &mut memo)
}

fn strat_rec(g: &Grammar, p: &TermPair, n: u32, memo: &mut HashMap<(TermPair, u32), bool>) -> bool {
    if n == 0 {
        return true;
    }
    if p.left == p.right {
        return true;
    }
    if let Some(&v) = memo.get(&(p.clone(), n)) {
        return v;
    }
    let mut ok = true;
    'attacks: for side in [Side::Left, Side::Right] {
        let attacker = side.of(p);
        let defender = side.other().of(p);
        for &a in g.enabled(attacker) {
            let after_a = g.fire(attacker, a);
            let answered = g.enabled(defender).iter().any(|&d| {
                if g.action_of(d) != g.action_of(a) {
                    return false;
                }
                let after_d = g.fire(defender, d);
                let q = match side {
                    Side::Left => TermPair::new(after_a.clone(), after_d),
                    Side::Right => TermPair::new(after_d, after_a.clone()),
                };
                strat_rec(g, &q, n - 1, memo)
            });
            if !answered {
                ok = false;
                break 'attacks;
            }
        }
    }
    memo.insert((p.clone(), n), ok);
    ok
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::repro::counterexample_grammar;

    fn pair(g: &Grammar, l: &str, r: &str) -> TermPair {
        g.parse_pair(l, r).unwrap()
    }

    fn play(g: &Grammar, s: &str) -> Play {
        Play::parse(g, s).unwrap()
    }

    #[test]
    fn plays_from_ab() {
        let g = counterexample_grammar();
        let ab = pair(&g, "A(bot)", "B(bot)");
        assert!(is_play(&g, &ab, &play(&g, "r1:r3")));
        assert!(is_play(&g, &ab, &Play::empty()));
        // r1 and r4 both carry action a, so this is a legal (if unwise) round.
        assert!(is_play(&g, &ab, &play(&g, "r1:r4")));
        assert!(!is_play(&g, &ab, &play(&g, "r14:r14")));
        // r13 is labelled z (action b); r11 is x (action a).
        let ee = pair(&g, "E(bot)", "D(bot)");
        assert!(!is_play(&g, &ee, &play(&g, "r13:r11")));
    }

    #[test]
    fn next_positions() {
        let g = counterexample_grammar();
        let ab = pair(&g, "A(bot)", "B(bot)");
        assert_eq!(
            next(&g, &ab, &play(&g, "r1:r3")).unwrap(),
            pair(&g, "C(bot)", "C(bot)")
        );
        assert_eq!(next(&g, &ab, &Play::empty()).unwrap(), ab);
        assert_eq!(
            next(&g, &ab, &play(&g, "r1:r3 r5:r6")).unwrap(),
            pair(&g, "D(bot)", "E(bot)")
        );
        assert_eq!(
            next(&g, &ab, &play(&g, "r1:r3 r14:r14")),
            Err(GameError::NotAPlay { index: 1 })
        );
    }

    #[test]
    fn level_one() {
        let g = counterexample_grammar();
        assert!(!sim1(&g, &pair(&g, "D(bot)", "E(bot)")));
        assert!(sim1(&g, &pair(&g, "bot", "bot")));
        assert!(sim1(&g, &pair(&g, "A''(bot)", "B''(bot)")));
        assert!(!sim1(&g, &pair(&g, "L1", "bot")));
    }

    #[test]
    fn fullness() {
        let g = counterexample_grammar();
        let r = |n: &str| g.rule_id(n).unwrap();
        let cc = pair(&g, "C(bot)", "C(bot)");
        let s1: MovePairSet = [
            MovePair::new(r("r5"), r("r6")),
            MovePair::new(r("r6"), r("r5")),
        ]
        .into();
        assert_eq!(full_for(&g, &s1, &cc), Ok(true));
        assert_eq!(
            full_for(&g, &MovePairSet::new(), &pair(&g, "bot", "bot")),
            Ok(true)
        );
        assert_eq!(
            full_for(&g, &MovePairSet::new(), &pair(&g, "E(bot)", "E(bot)")),
            Ok(false)
        );
        let half: MovePairSet = [MovePair::new(r("r5"), r("r6"))].into();
        assert_eq!(full_for(&g, &half, &cc), Ok(false));
        let bad: MovePairSet = [MovePair::new(r("r13"), r("r12"))].into();
        assert!(matches!(
            full_for(&g, &bad, &pair(&g, "E(bot)", "E(bot)")),
            Err(GameError::ActionMismatch { .. })
        ));
    }

    #[test]
    fn stratified_levels() {
        let g = counterexample_grammar();
        let ab = pair(&g, "A(bot)", "B(bot)");
        assert!(strat_equiv(&g, &ab, 3));
        assert!(!strat_equiv(&g, &ab, 4));
        assert!(strat_equiv(&g, &pair(&g, "D(bot)", "E(bot)"), 0));
        assert!(!strat_equiv(&g, &pair(&g, "D(bot)", "E(bot)"), 1));
    }

    #[test]
    fn play_text_errors() {
        let g = counterexample_grammar();
        assert_eq!(
            Play::parse(&g, "r1-r3"),
            Err(GameError::MalformedStep("r1-r3".into()))
        );
        assert_eq!(
            Play::parse(&g, "r1:r99"),
            Err(GameError::UnknownRule("r99".into()))
        );
        assert_eq!(Play::parse(&g, "ε"), Ok(Play::empty()));
        assert_eq!(
            play(&g, "r1:r3 r5:r6").display(&g).to_string(),
            "r1:r3 r5:r6"
        );
    }
}
