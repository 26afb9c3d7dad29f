//! First-order grammars: ranked nonterminals, labelled rules, and the
//! labelled transition system they induce on ground terms.
//!
//! A rule `N(v1..vn) --x--> rhs` is enabled on every ground term whose root
//! is `N`; firing it substitutes the arguments of that term for the
//! variables of `rhs`. Rules carry an intermediate label which the grammar
//! maps to an observable action.

mod dsl;
mod term;

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;

use thiserror::Error;

pub use dsl::{parse_grammar, Diagnostic, DiagnosticKind};
pub use term::{GroundTerm, Term, TermError, TermPair};

pub(crate) use term::{lex, variable_index, TermParser};

macro_rules! id_type {
    ($(#[$m:meta])* $name:ident) => {
        $(#[$m])*
        #[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
        pub struct $name(pub u32);

        impl $name {
            pub fn index(self) -> usize {
                self.0 as usize
            }
        }
    };
}

id_type!(
    /// Index of a nonterminal in declaration order.
    NtId
);
id_type!(
    /// Index of an observable action in declaration order.
    ActionId
);
id_type!(
    /// Index of an intermediate label in declaration order.
    LabelId
);
id_type!(
    /// Index of a rule in declaration order. Ordering on `RuleId` is the
    /// deterministic iteration order used everywhere.
    RuleId
);

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NonTerminal {
    name: String,
    arity: usize,
}

impl NonTerminal {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn arity(&self) -> usize {
        self.arity
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Label {
    name: String,
    action: ActionId,
}

impl Label {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn action(&self) -> ActionId {
        self.action
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rule {
    name: String,
    head: NtId,
    rhs: Term,
    label: LabelId,
    action: ActionId,
}

impl Rule {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn head(&self) -> NtId {
        self.head
    }

    pub fn rhs(&self) -> &Term {
        &self.rhs
    }

    pub fn label(&self) -> LabelId {
        self.label
    }

    /// The observable action, i.e. the image of the rule's label.
    pub fn action(&self) -> ActionId {
        self.action
    }
}

/// Errors raised while assembling a grammar.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum GrammarError {
    #[error("duplicate action `{0}`")]
    DuplicateAction(String),
    #[error("duplicate label `{0}`")]
    DuplicateLabel(String),
    #[error("duplicate nonterminal `{0}`")]
    DuplicateNonterminal(String),
    #[error("duplicate rule id `{0}`")]
    DuplicateRule(String),
    #[error("undeclared action `{0}`")]
    UndeclaredAction(String),
    #[error("undeclared label `{0}`")]
    UndeclaredLabel(String),
    #[error("unknown nonterminal `{0}`")]
    UnknownNonterminal(String),
    #[error("`{0}` is reserved and cannot name a symbol")]
    ReservedName(String),
    #[error(transparent)]
    Term(#[from] TermError),
}

/// Errors raised by the transition relation.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum StepError {
    #[error("term references nonterminal #{0} which is not in the grammar")]
    UnknownNonterminal(u32),
    #[error("term applies `{name}` to {found} argument(s), expected {expected}")]
    ArityMismatch {
        name: String,
        expected: usize,
        found: usize,
    },
    #[error("unknown rule #{0}")]
    UnknownRule(u32),
    #[error("rule `{rule}` is not enabled on `{term}`")]
    RuleNotEnabled { rule: String, term: String },
}

/// A first-order grammar `(N, A, R)` together with its label alphabet and
/// label-to-action map.
#[derive(Clone, Debug, Default)]
pub struct Grammar {
    actions: Vec<String>,
    labels: Vec<Label>,
    nonterminals: Vec<NonTerminal>,
    rules: Vec<Rule>,
    action_ix: HashMap<String, ActionId>,
    label_ix: HashMap<String, LabelId>,
    nt_ix: HashMap<String, NtId>,
    rule_ix: HashMap<String, RuleId>,
    by_head: Vec<Vec<RuleId>>,
}

impl Grammar {
    pub fn actions(&self) -> impl ExactSizeIterator<Item = (ActionId, &str)> {
        self.actions
            .iter()
            .enumerate()
            .map(|(i, a)| (ActionId(i as u32), a.as_str()))
    }

    pub fn labels(&self) -> impl ExactSizeIterator<Item = (LabelId, &Label)> {
        self.labels
            .iter()
            .enumerate()
            .map(|(i, l)| (LabelId(i as u32), l))
    }

    pub fn nonterminals(&self) -> impl ExactSizeIterator<Item = (NtId, &NonTerminal)> {
        self.nonterminals
            .iter()
            .enumerate()
            .map(|(i, n)| (NtId(i as u32), n))
    }

    pub fn rules(&self) -> impl ExactSizeIterator<Item = (RuleId, &Rule)> {
        self.rules
            .iter()
            .enumerate()
            .map(|(i, r)| (RuleId(i as u32), r))
    }

    pub fn num_rules(&self) -> usize {
        self.rules.len()
    }

    pub fn num_nonterminals(&self) -> usize {
        self.nonterminals.len()
    }

    pub fn nonterminal(&self, id: NtId) -> &NonTerminal {
        &self.nonterminals[id.index()]
    }

    pub fn nonterminal_id(&self, name: &str) -> Option<NtId> {
        self.nt_ix.get(name).copied()
    }

    pub fn rule(&self, id: RuleId) -> &Rule {
        &self.rules[id.index()]
    }

    pub fn rule_id(&self, name: &str) -> Option<RuleId> {
        self.rule_ix.get(name).copied()
    }

    pub fn rule_name(&self, id: RuleId) -> &str {
        &self.rules[id.index()].name
    }

    pub fn label(&self, id: LabelId) -> &Label {
        &self.labels[id.index()]
    }

    pub fn label_id(&self, name: &str) -> Option<LabelId> {
        self.label_ix.get(name).copied()
    }

    pub fn action_id(&self, name: &str) -> Option<ActionId> {
        self.action_ix.get(name).copied()
    }

    pub fn action_name(&self, id: ActionId) -> &str {
        &self.actions[id.index()]
    }

    /// Checks that every nonterminal of `t` exists and is applied to the
    /// right number of arguments.
    pub fn check_term(&self, t: &GroundTerm) -> Result<(), StepError> {
        match t {
            GroundTerm::Bot => Ok(()),
            GroundTerm::App(nt, args) => {
                let decl = self
                    .nonterminals
                    .get(nt.index())
                    .ok_or(StepError::UnknownNonterminal(nt.0))?;
                if decl.arity != args.len() {
                    return Err(StepError::ArityMismatch {
                        name: decl.name.clone(),
                        expected: decl.arity,
                        found: args.len(),
                    });
                }
                args.iter().try_for_each(|a| self.check_term(a))
            }
        }
    }

    /// Rules whose head is the root of `t`, in declaration order.
    pub fn enabled_rules(&self, t: &GroundTerm) -> Result<Vec<RuleId>, StepError> {
        self.check_term(t)?;
        Ok(self.enabled(t).to_vec())
    }

    /// Unchecked variant of [`Grammar::enabled_rules`] for terms already
    /// known to belong to this grammar.
    pub fn enabled(&self, t: &GroundTerm) -> &[RuleId] {
        match t.root() {
            None => &[],
            Some(nt) => self.by_head.get(nt.index()).map_or(&[], Vec::as_slice),
        }
    }

    pub fn is_enabled(&self, t: &GroundTerm, r: RuleId) -> bool {
        self.rules
            .get(r.index())
            .is_some_and(|rule| t.root() == Some(rule.head))
    }

    /// Fires `r` on `t`.
    pub fn apply_rule(&self, t: &GroundTerm, r: RuleId) -> Result<GroundTerm, StepError> {
        let rule = self
            .rules
            .get(r.index())
            .ok_or(StepError::UnknownRule(r.0))?;
        match t {
            GroundTerm::App(nt, args) if *nt == rule.head => Ok(rule.rhs.instantiate(args)),
            _ => Err(StepError::RuleNotEnabled {
                rule: rule.name.clone(),
                term: t.display(self).to_string(),
            }),
        }
    }

    /// Fires `r` on `t`; the caller has established that `r` is enabled.
    pub(crate) fn fire(&self, t: &GroundTerm, r: RuleId) -> GroundTerm {
        match t {
            GroundTerm::App(_, args) => self.rules[r.index()].rhs.instantiate(args),
            GroundTerm::Bot => unreachable!("no rule is enabled on bot"),
        }
    }

    /// The action of a rule: the image of its label under the label map.
    pub fn act(&self, r: RuleId) -> Result<ActionId, StepError> {
        self.rules
            .get(r.index())
            .map(|rule| rule.action)
            .ok_or(StepError::UnknownRule(r.0))
    }

    pub(crate) fn action_of(&self, r: RuleId) -> ActionId {
        self.rules[r.index()].action
    }

    /// Sorted, deduplicated actions of the rules enabled on `t`.
    pub fn enabled_actions(&self, t: &GroundTerm) -> Vec<ActionId> {
        let mut acts: Vec<ActionId> = self.enabled(t).iter().map(|&r| self.action_of(r)).collect();
        acts.sort_unstable();
        acts.dedup();
        acts
    }

    /// Whether some rule sequence fireable from `t` emits exactly the action
    /// word `w`.
    pub fn word_reachable(&self, t: &GroundTerm, w: &[ActionId]) -> bool {
        self.word_run(t, w).is_some()
    }

    /// A rule sequence from `t` whose action word is `w`, if one exists.
    ///
    /// Breadth-first over `(term, position in w)`; every step consumes one
    /// letter of `w`, so the search is finite.
    pub fn word_run(&self, t: &GroundTerm, w: &[ActionId]) -> Option<Vec<RuleId>> {
        let mut seen: HashSet<(GroundTerm, usize)> = HashSet::new();
        // (term, position, index of parent entry, rule used to get here)
        let mut trail: Vec<(GroundTerm, usize, usize, Option<RuleId>)> = Vec::new();
        let mut queue = VecDeque::new();
        seen.insert((t.clone(), 0));
        trail.push((t.clone(), 0, usize::MAX, None));
        queue.push_back(0usize);
        while let Some(ix) = queue.pop_front() {
            let (term, pos) = (trail[ix].0.clone(), trail[ix].1);
            if pos == w.len() {
                let mut run = Vec::new();
                let mut cur = ix;
                while let Some(r) = trail[cur].3 {
                    run.push(r);
                    cur = trail[cur].2;
                }
                run.reverse();
                return Some(run);
            }
            for &r in self.enabled(&term) {
                if self.action_of(r) != w[pos] {
                    continue;
                }
                let next = self.fire(&term, r);
                if seen.insert((next.clone(), pos + 1)) {
                    trail.push((next, pos + 1, ix, Some(r)));
                    queue.push_back(trail.len() - 1);
                }
            }
        }
        None
    }

    /// Parses a whitespace-separated action word such as `a a a b`.
    pub fn parse_action_word(&self, text: &str) -> Result<Vec<ActionId>, GrammarError> {
        text.split_whitespace()
            .map(|a| {
                self.action_id(a)
                    .ok_or_else(|| GrammarError::UndeclaredAction(a.to_string()))
            })
            .collect()
    }

    pub fn show_action_word(&self, w: &[ActionId]) -> String {
        w.iter()
            .map(|&a| self.action_name(a))
            .collect::<Vec<_>>()
            .join(" ")
    }

    /// Renders the grammar in the line-oriented DSL accepted by
    /// [`parse_grammar`].
    pub fn to_dsl(&self) -> String {
        dsl::render(self)
    }
}

fn reserved(name: &str) -> bool {
    name == "bot" || name == "⊥" || variable_index(name).is_some()
}

/// Incremental, validating grammar constructor.
#[derive(Debug, Default)]
pub struct GrammarBuilder {
    g: Grammar,
}

impl GrammarBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn action(&mut self, name: &str) -> Result<ActionId, GrammarError> {
        if self.g.action_ix.contains_key(name) {
            return Err(GrammarError::DuplicateAction(name.into()));
        }
        let id = ActionId(self.g.actions.len() as u32);
        self.g.actions.push(name.into());
        self.g.action_ix.insert(name.into(), id);
        Ok(id)
    }

    pub fn label(&mut self, name: &str, action: &str) -> Result<LabelId, GrammarError> {
        if self.g.label_ix.contains_key(name) {
            return Err(GrammarError::DuplicateLabel(name.into()));
        }
        let action = self
            .g
            .action_id(action)
            .ok_or_else(|| GrammarError::UndeclaredAction(action.into()))?;
        let id = LabelId(self.g.labels.len() as u32);
        self.g.labels.push(Label {
            name: name.into(),
            action,
        });
        self.g.label_ix.insert(name.into(), id);
        Ok(id)
    }

    pub fn nonterminal(&mut self, name: &str, arity: usize) -> Result<NtId, GrammarError> {
        if reserved(name) {
            return Err(GrammarError::ReservedName(name.into()));
        }
        if self.g.nt_ix.contains_key(name) {
            return Err(GrammarError::DuplicateNonterminal(name.into()));
        }
        let id = NtId(self.g.nonterminals.len() as u32);
        self.g.nonterminals.push(NonTerminal {
            name: name.into(),
            arity,
        });
        self.g.nt_ix.insert(name.into(), id);
        self.g.by_head.push(Vec::new());
        Ok(id)
    }

    /// Adds a rule whose right-hand side is already built. Variables in
    /// `rhs` must be below the head's arity.
    pub fn rule(
        &mut self,
        name: &str,
        head: &str,
        label: &str,
        rhs: Term,
    ) -> Result<RuleId, GrammarError> {
        if self.g.rule_ix.contains_key(name) {
            return Err(GrammarError::DuplicateRule(name.into()));
        }
        let head_id = self
            .g
            .nonterminal_id(head)
            .ok_or_else(|| GrammarError::UnknownNonterminal(head.into()))?;
        let label_id = self
            .g
            .label_id(label)
            .ok_or_else(|| GrammarError::UndeclaredLabel(label.into()))?;
        let arity = self.g.nonterminal(head_id).arity;
        if let Some(v) = rhs.max_var() {
            if v >= arity {
                return Err(TermError::VariableOutOfRange {
                    column: 0,
                    symbol: format!("v{}", v + 1),
                    arity,
                }
                .into());
            }
        }
        self.check_rhs(&rhs)?;
        let id = RuleId(self.g.rules.len() as u32);
        let action = self.g.label(label_id).action;
        self.g.rules.push(Rule {
            name: name.into(),
            head: head_id,
            rhs,
            label: label_id,
            action,
        });
        self.g.rule_ix.insert(name.into(), id);
        self.g.by_head[head_id.index()].push(id);
        Ok(id)
    }

    /// Adds a rule whose right-hand side is given in term syntax.
    pub fn rule_text(
        &mut self,
        name: &str,
        head: &str,
        label: &str,
        rhs: &str,
    ) -> Result<RuleId, GrammarError> {
        let head_id = self
            .g
            .nonterminal_id(head)
            .ok_or_else(|| GrammarError::UnknownNonterminal(head.into()))?;
        let arity = self.g.nonterminal(head_id).arity;
        let toks = lex(rhs, 0)?;
        let mut p = TermParser::new(&self.g, &toks, Some(arity), rhs.chars().count() + 1);
        let t = p.parse()?;
        p.expect_end()?;
        self.rule(name, head, label, t)
    }

    fn check_rhs(&self, t: &Term) -> Result<(), GrammarError> {
        match t {
            Term::Var(_) | Term::Bot => Ok(()),
            Term::App(nt, args) => {
                let decl = self
                    .g
                    .nonterminals
                    .get(nt.index())
                    .ok_or_else(|| GrammarError::UnknownNonterminal(format!("#{}", nt.0)))?;
                if decl.arity != args.len() {
                    return Err(TermError::ArityMismatch {
                        column: 0,
                        symbol: decl.name.clone(),
                        expected: decl.arity,
                        found: args.len(),
                    }
                    .into());
                }
                args.iter().try_for_each(|a| self.check_rhs(a))
            }
        }
    }

    pub(crate) fn grammar(&self) -> &Grammar {
        &self.g
    }

    pub fn build(self) -> Grammar {
        self.g
    }
}

impl fmt::Display for Grammar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_dsl())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> Grammar {
        let mut b = GrammarBuilder::new();
        b.action("a").unwrap();
        b.action("b").unwrap();
        b.label("x", "a").unwrap();
        b.label("z", "b").unwrap();
        b.nonterminal("P", 1).unwrap();
        b.nonterminal("Q", 2).unwrap();
        b.nonterminal("K", 0).unwrap();
        b.rule_text("p1", "P", "x", "Q(v, K)").unwrap();
        b.rule_text("q1", "Q", "z", "v2").unwrap();
        b.rule_text("q2", "Q", "x", "P(v1)").unwrap();
        b.build()
    }

    #[test]
    fn builder_rejects_bad_declarations() {
        let mut b = GrammarBuilder::new();
        b.action("a").unwrap();
        assert_eq!(
            b.action("a"),
            Err(GrammarError::DuplicateAction("a".into()))
        );
        assert_eq!(
            b.label("x", "c"),
            Err(GrammarError::UndeclaredAction("c".into()))
        );
        assert_eq!(
            b.nonterminal("bot", 0),
            Err(GrammarError::ReservedName("bot".into()))
        );
        assert_eq!(
            b.nonterminal("v2", 0),
            Err(GrammarError::ReservedName("v2".into()))
        );
        b.nonterminal("P", 1).unwrap();
        b.label("x", "a").unwrap();
        assert!(matches!(
            b.rule_text("r", "P", "x", "P(v2)"),
            Err(GrammarError::Term(TermError::VariableOutOfRange { .. }))
        ));
        assert_eq!(
            b.rule_text("r", "P", "y", "v"),
            Err(GrammarError::UndeclaredLabel("y".into()))
        );
        b.rule_text("r", "P", "x", "v").unwrap();
        assert_eq!(
            b.rule_text("r", "P", "x", "v"),
            Err(GrammarError::DuplicateRule("r".into()))
        );
    }

    #[test]
    fn application_substitutes_arguments() {
        let g = small();
        let t = g.parse_term("P(K)").unwrap();
        let p1 = g.rule_id("p1").unwrap();
        let u = g.apply_rule(&t, p1).unwrap();
        assert_eq!(u.display(&g).to_string(), "Q(K,K)");
        let q1 = g.rule_id("q1").unwrap();
        assert_eq!(g.apply_rule(&u, q1).unwrap(), g.parse_term("K").unwrap());
        assert!(matches!(
            g.apply_rule(&t, q1),
            Err(StepError::RuleNotEnabled { .. })
        ));
        assert_eq!(
            g.apply_rule(&t, RuleId(99)),
            Err(StepError::UnknownRule(99))
        );
    }

    #[test]
    fn enabled_rules_checks_term() {
        let g = small();
        let bogus = GroundTerm::constant(NtId(42));
        assert_eq!(
            g.enabled_rules(&bogus),
            Err(StepError::UnknownNonterminal(42))
        );
        let wrong_arity = GroundTerm::app(NtId(0), []);
        assert!(matches!(
            g.enabled_rules(&wrong_arity),
            Err(StepError::ArityMismatch { .. })
        ));
        let q = g.parse_term("Q(bot, K)").unwrap();
        let names: Vec<_> = g
            .enabled_rules(&q)
            .unwrap()
            .into_iter()
            .map(|r| g.rule_name(r))
            .collect();
        assert_eq!(names, ["q1", "q2"]);
    }

    #[test]
    fn term_parse_errors() {
        let g = small();
        assert!(matches!(
            g.parse_term("R(bot)"),
            Err(TermError::UnknownSymbol { column: 1, .. })
        ));
        assert!(matches!(
            g.parse_term("P(bot, bot)"),
            Err(TermError::ArityMismatch { .. })
        ));
        assert!(matches!(
            g.parse_term("P(bot"),
            Err(TermError::Syntax { .. })
        ));
        assert!(matches!(
            g.parse_term("P(v)"),
            Err(TermError::UnknownSymbol { .. })
        ));
        assert!(matches!(
            g.parse_term("K K"),
            Err(TermError::Syntax { column: 3, .. })
        ));
        assert_eq!(g.parse_term("K()").unwrap(), g.parse_term("K").unwrap());
        assert_eq!(g.parse_term("⊥").unwrap(), GroundTerm::Bot);
    }

    #[test]
    fn word_run_gives_witness() {
        let g = small();
        let t = g.parse_term("P(bot)").unwrap();
        let w = g.parse_action_word("a b").unwrap();
        let run = g.word_run(&t, &w).unwrap();
        let names: Vec<_> = run.iter().map(|&r| g.rule_name(r)).collect();
        assert_eq!(names, ["p1", "q1"]);
        assert!(!g.word_reachable(&t, &g.parse_action_word("b").unwrap()));
        assert!(g.word_reachable(&GroundTerm::Bot, &[]));
    }
}
