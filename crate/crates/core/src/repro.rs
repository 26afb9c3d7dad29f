//! The bundled counterexample: its grammar, the Defender strategies used
//! in the (unsound) equivalence proof of `A(⊥) ∼ B(⊥)`, the lengthened
//! family, and a claim suite that recomputes every fact the argument
//! relies on.

use std::collections::BTreeMap;
use std::ops::RangeInclusive;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::game::{eq_level, EqLevel, Play};
use crate::grammar::{parse_grammar, Grammar, GrammarBuilder, GrammarError};
use crate::judgment::Basis;
use crate::strategy::{
    check_finite_prefix, check_winning, identity_strategy, indstr, make_playset, materialize,
    strategy_eq_level, PlaySet, Strategy,
};

/// DSL source of the counterexample grammar.
pub const COUNTEREXAMPLE_SOURCE: &str = include_str!("../grammars/counterexample.fog");

pub fn counterexample_grammar() -> Grammar {
    parse_grammar(COUNTEREXAMPLE_SOURCE).expect("bundled grammar is valid")
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum FamilyError {
    #[error("family parameter must be at least 1")]
    ZeroLength,
    #[error(transparent)]
    Grammar(#[from] GrammarError),
}

/// The counterexample with the final `D`/`E` rules replaced by chains
/// `D → D1 → … → Dk → v` and `E → E1 → … → Ek → v` (the last `E` step
/// also by `z`). Rules are numbered `r1, r2, …` in declaration order.
pub fn family_grammar(k: u32) -> Result<Grammar, FamilyError> {
    if k == 0 {
        return Err(FamilyError::ZeroLength);
    }
    let mut b = GrammarBuilder::new();
    for a in ["a", "b", "l1"] {
        b.action(a)?;
    }
    for (l, a) in [("x", "a"), ("y", "a"), ("z", "b"), ("l1", "l1")] {
        b.label(l, a)?;
    }
    for nt in ["A", "A'", "A''", "B", "B'", "B''", "C", "D", "E"] {
        b.nonterminal(nt, 1)?;
    }
    for i in 1..=k {
        b.nonterminal(&format!("D{i}"), 1)?;
        b.nonterminal(&format!("E{i}"), 1)?;
    }
    b.nonterminal("L1", 0)?;

    let mut rules: Vec<(String, &str, String)> = [
        ("A", "y", "C(v)"),
        ("A", "x", "A'(v)"),
        ("B", "x", "C(v)"),
        ("B", "y", "B'(v)"),
        ("C", "x", "D(v)"),
        ("C", "y", "E(v)"),
        ("A'", "x", "A''(v)"),
        ("B'", "x", "B''(v)"),
        ("A''", "x", "D(v)"),
        ("B''", "x", "E(v)"),
        ("D", "x", "D1(v)"),
        ("E", "x", "E1(v)"),
    ]
    .into_iter()
    .map(|(h, l, r)| (h.to_string(), l, r.to_string()))
    .collect();
    for i in 1..k {
        rules.push((format!("D{i}"), "x", format!("D{}(v)", i + 1)));
        rules.push((format!("E{i}"), "x", format!("E{}(v)", i + 1)));
    }
    rules.push((format!("D{k}"), "x", "v".into()));
    rules.push((format!("E{k}"), "x", "v".into()));
    rules.push((format!("E{k}"), "z", "v".into()));
    for (i, (head, label, rhs)) in rules.iter().enumerate() {
        b.rule_text(&format!("r{}", i + 1), head, label, rhs)?;
    }
    let last = rules.len() + 1;
    b.rule_text(&format!("r{last}"), "L1", "l1", "bot")?;
    Ok(b.build())
}

/// The named strategies of the counterexample proof.
#[derive(Clone, Debug)]
pub struct ProofStrategies {
    map: BTreeMap<String, Strategy>,
}

impl ProofStrategies {
    pub fn get(&self, name: &str) -> Option<&Strategy> {
        self.map.get(name)
    }

    pub fn finite(&self, name: &str) -> Option<&PlaySet> {
        self.get(name).and_then(Strategy::as_finite)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.map.keys().map(String::as_str)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Strategy)> {
        self.map.iter().map(|(k, v)| (k.as_str(), v))
    }
}

fn plays(g: &Grammar, lines: &[&str]) -> PlaySet {
    let ps: Vec<Play> = lines
        .iter()
        .map(|l| Play::parse(g, l).expect("bundled play is valid"))
        .collect();
    make_playset(&ps)
}

/// `S`, `S1`–`S6` and the identity strategies `Id_N,i` on the
/// counterexample grammar.
pub fn proof_strategies(g: &Grammar) -> ProofStrategies {
    let term = |s: &str| g.parse_term(s).expect("bundled term is valid");
    let s = plays(g, &["r1:r3 r5:r6", "r1:r3 r6:r5", "r2:r4 r7:r8 r9:r10"]);
    let s2 = PlaySet::new();
    let s5 = PlaySet::new();
    let id_c = identity_strategy(&term("C(L1)"));
    let id_d = identity_strategy(&term("D(L1)"));
    let id_e = identity_strategy(&term("E(L1)"));
    let id1 = plays(g, &["r14:r14"]);

    let mut map: BTreeMap<String, Strategy> = BTreeMap::new();
    let mut put = |k: &str, v: Strategy| {
        map.insert(k.to_string(), v);
    };
    put("S", s.into());
    put("S1", plays(g, &["r5:r6", "r6:r5"]).into());
    put("S2", s2.clone().into());
    put("S3", plays(g, &["r7:r8 r9:r10"]).into());
    put("S4", plays(g, &["r9:r10"]).into());
    put("S5", s5.clone().into());
    put("S6", indstr(&s2, &s5).into());
    put("Id_C,0", PlaySet::new().into());
    put("Id_D,0", PlaySet::new().into());
    put("Id_E,0", PlaySet::new().into());
    put("Id_C,1", materialize(g, &id_c, 1).into());
    put("Id_D,1", id1.clone().into());
    put("Id_E,1", id1.into());
    put("Id_D,2", materialize(g, &id_d, 2).into());
    put("Id_E,2", materialize(g, &id_e, 2).into());
    put("Id_C,inf", id_c.into());
    ProofStrategies { map }
}

/// `{(C(L1),C(L1)), (D(L1),D(L1)), (E(L1),E(L1))}`.
pub fn counterexample_basis(g: &Grammar) -> Basis {
    Basis::new(["C", "D", "E"].map(|n| {
        let t = format!("{n}(L1)");
        g.parse_pair(&t, &t).expect("bundled term is valid")
    }))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClaimResult {
    pub id: String,
    pub description: String,
    pub expected: String,
    pub computed: String,
    pub pass: bool,
    pub witness: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub claims: Vec<ClaimResult>,
    pub all_pass: bool,
}

impl Report {
    pub fn claim(&self, id: &str) -> Option<&ClaimResult> {
        self.claims.iter().find(|c| c.id == id)
    }
}

struct Claims(Vec<ClaimResult>);

impl Claims {
    fn add(
        &mut self,
        id: &str,
        description: &str,
        expected: impl ToString,
        computed: impl ToString,
        witness: Option<String>,
    ) {
        let (expected, computed) = (expected.to_string(), computed.to_string());
        self.0.push(ClaimResult {
            id: id.into(),
            description: description.into(),
            pass: expected == computed,
            expected,
            computed,
            witness,
        });
    }
}

fn verdict_text(g: &Grammar, v: &crate::strategy::StrategyVerdict) -> String {
    if v.accepted {
        match v.depth {
            Some(n) => format!("accepted n={n}"),
            None => "accepted".into(),
        }
    } else {
        let r = v.report(g);
        format!(
            "rejected {} at {}",
            r.violated_condition.map_or("?".into(), |c| c.to_string()),
            r.witness.unwrap_or_default()
        )
    }
}

/// Recomputes every claim of the counterexample. `budget` bounds the
/// state exploration of each level computation; family claims are made
/// for each `k` in `k_range`. Every claim is evaluated regardless of
/// earlier failures, in a fixed order.
pub fn run_repro(budget: usize, k_range: RangeInclusive<u32>) -> Report {
    let g = counterexample_grammar();
    let st = proof_strategies(&g);
    let fin = |n: &str| st.finite(n).expect("named strategy exists").clone();
    let pair = |l: &str, r: &str| g.parse_pair(l, r).expect("bundled term is valid");
    let mut c = Claims(Vec::new());

    let ab = pair("A(bot)", "B(bot)");
    let lv_ab = eq_level(&g, &ab, budget);
    c.add(
        "eqlv-AB",
        "equivalence level of (A(⊥), B(⊥))",
        EqLevel::Exact(3),
        lv_ab,
        None,
    );

    let w = g.parse_action_word("a a a b").expect("declared actions");
    let (wa, wb) = (
        g.word_reachable(&ab.left, &w),
        g.word_reachable(&ab.right, &w),
    );
    let run = g.word_run(&ab.right, &w).map(|rs| {
        rs.iter()
            .map(|&r| g.rule_name(r))
            .collect::<Vec<_>>()
            .join(" ")
    });
    c.add(
        "word-aaab",
        "aaab is performable from B(⊥) but not from A(⊥)",
        "A(bot):false B(bot):true",
        format!("A(bot):{wa} B(bot):{wb}"),
        run.map(|r| format!("aaab via {r}")),
    );

    let s = fin("S");
    c.add(
        "prefix-S",
        "S is a finite prefix of a Defender strategy at (A(⊥), B(⊥))",
        "accepted n=3",
        verdict_text(&g, &check_finite_prefix(&g, &ab, &s)),
        None,
    );
    let mut cut = s.clone();
    cut.remove(&Play::parse(&g, "r1:r3 r6:r5").expect("valid play"));
    let v = check_finite_prefix(&g, &ab, &cut);
    c.add(
        "prefix-S-mutation",
        "S without r1:r3 r6:r5 is rejected",
        "rejected DQ4 at r1:r3",
        verdict_text(&g, &v),
        v.report(&g).witness,
    );

    let ee = pair("E(bot)", "E(bot)");
    let s6 = st.get("S6").expect("S6 exists");
    let lv_s6 = strategy_eq_level(&g, &ee, s6, budget);
    c.add(
        "eqlv-EE-S6",
        "level of (E(⊥), E(⊥)) under S6",
        EqLevel::Exact(0),
        lv_s6,
        None,
    );
    c.add(
        "eqlv-AB-S",
        "level of (A(⊥), B(⊥)) under S",
        EqLevel::Exact(3),
        strategy_eq_level(&g, &ab, &Strategy::Finite(s.clone()), budget),
        None,
    );

    let el1 = pair("E(L1)", "E(L1)");
    let lv_el1 = eq_level(&g, &el1, budget);
    c.add(
        "eqlv-EL1",
        "equivalence level of (E(L1), E(L1))",
        EqLevel::Infinite,
        lv_el1,
        None,
    );
    let lv_ee = eq_level(&g, &ee, budget);
    c.add(
        "eqlv-Ebot",
        "equivalence level of (E(⊥), E(⊥))",
        EqLevel::Infinite,
        lv_ee,
        None,
    );
    c.add(
        "ineq-monotone",
        "EqLv(E(L1),E(L1)) ≤ EqLv(E(⊥),E(⊥))",
        true,
        lv_el1.is_conclusive() && lv_ee.is_conclusive() && lv_el1.level() <= lv_ee.level(),
        None,
    );
    c.add(
        "ineq-strict",
        "EqLv(E(L1),E(L1)) > EqLv(E(⊥),E(⊥),S6)",
        true,
        lv_el1.is_conclusive() && lv_s6.is_conclusive() && lv_el1.level() > lv_s6.level(),
        Some(format!("{lv_el1} > {lv_s6}")),
    );

    for (id, n, strat) in [
        ("winning-IdD2", "D", "Id_D,2"),
        ("winning-IdE2", "E", "Id_E,2"),
    ] {
        let t = format!("{n}(L1)");
        let text = match check_winning(&g, &pair(&t, &t), &fin(strat), budget) {
            Ok(v) => verdict_text(&g, &v),
            Err(e) => e.to_string(),
        };
        c.add(
            id,
            &format!("{strat} is a winning strategy at ({t}, {t})"),
            "accepted",
            text,
            None,
        );
    }
    c.add(
        "prefix-IdC1",
        "Id_C,1 is a finite strategy prefix at (C(L1), C(L1))",
        "accepted n=1",
        verdict_text(
            &g,
            &check_finite_prefix(&g, &pair("C(L1)", "C(L1)"), &fin("Id_C,1")),
        ),
        None,
    );

    for (id, base, alpha, target) in [
        ("residual-S-r1r3", "S", "r1:r3", "S1"),
        ("residual-S-r2r4", "S", "r2:r4", "S3"),
        ("residual-S3-r7r8", "S3", "r7:r8", "S4"),
    ] {
        let a = Play::parse(&g, alpha).expect("valid play");
        let computed = match fin(base).residual(&a) {
            Ok(r) => r.display_set(&g),
            Err(e) => e.to_string(),
        };
        c.add(
            id,
            &format!("{alpha} \\ {base} = {target}"),
            fin(target).display_set(&g),
            computed,
            None,
        );
    }

    c.add(
        "indstr-S2-S5",
        "composition of S2⁻¹ with S5",
        "{ε}",
        indstr(&fin("S2"), &fin("S5")).display_set(&g),
        None,
    );

    let basis = counterexample_basis(&g);
    let levels: Vec<String> = basis
        .iter()
        .map(|p| eq_level(&g, p, budget).to_string())
        .collect();
    c.add(
        "basis-reflexive",
        "every basis pair is bisimilar",
        "Infinite Infinite Infinite",
        levels.join(" "),
        None,
    );

    for k in k_range {
        match family_grammar(k) {
            Ok(fg) => {
                let p = fg
                    .parse_pair("A(bot)", "B(bot)")
                    .expect("family has A and B");
                c.add(
                    &format!("family-k{k}"),
                    &format!("equivalence level of (A(⊥), B(⊥)) with chains of length {k}"),
                    EqLevel::Exact(3 + k),
                    eq_level(&fg, &p, budget),
                    None,
                );
                let text = format!("{}b", "a ".repeat(3 + k as usize));
                let w = fg.parse_action_word(&text).expect("declared actions");
                c.add(
                    &format!("family-word-k{k}"),
                    &format!("a^{}b separates A(⊥) from B(⊥)", 3 + k),
                    "A(bot):false B(bot):true",
                    format!(
                        "A(bot):{} B(bot):{}",
                        fg.word_reachable(&p.left, &w),
                        fg.word_reachable(&p.right, &w)
                    ),
                    Some(text.replace(' ', "")),
                );
            }
            Err(e) => c.add(
                &format!("family-k{k}"),
                "family grammar",
                "grammar",
                e,
                None,
            ),
        }
    }

    // The proof ingredients are all accepted although the root pair is not
    // bisimilar.
    let ingredients = check_finite_prefix(&g, &ab, &s).accepted
        && basis
            .iter()
            .all(|p| eq_level(&g, p, budget) == EqLevel::Infinite);
    c.add(
        "unsound",
        "accepted prefix and bisimilar basis for a non-bisimilar pair",
        true,
        ingredients && matches!(lv_ab, EqLevel::Exact(_)),
        None,
    );

    let all_pass = c.0.iter().all(|r| r.pass);
    Report {
        claims: c.0,
        all_pass,
    }
}
