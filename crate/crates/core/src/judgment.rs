//! Judgments of the formal system `J(T₀, T'₀, S₀, B)` and their
//! well-formedness conditions.
//!
//! Three forms are recognised:
//!
//! 1. `m |== (T, T', S)`
//! 2. `m |== (T, T', S) ~> α |== (T₁, T'₁, S₁)`
//! 3. `m |== (T, T', S) ~> α |== SUCC`
//!
//! Only the judgments themselves, the basis and the axiom are checked here;
//! deduction rules are not.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::game::{next, Play};
use crate::grammar::{Grammar, TermError, TermPair};
use crate::strategy::{check_finite_prefix, PlaySet, StrategyParseError, StrategyVerdict};

/// A finite set of term pairs usable by the basis rule.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Basis(pub BTreeSet<TermPair>);

impl Basis {
    pub fn new(pairs: impl IntoIterator<Item = TermPair>) -> Self {
        Basis(pairs.into_iter().collect())
    }

    pub fn contains(&self, p: &TermPair) -> bool {
        self.0.contains(p)
    }

    pub fn iter(&self) -> impl Iterator<Item = &TermPair> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Judgment {
    Form1 {
        m: u64,
        pair: TermPair,
        strategy: PlaySet,
    },
    Form2 {
        m: u64,
        pair: TermPair,
        strategy: PlaySet,
        alpha: Play,
        pair1: TermPair,
        strategy1: PlaySet,
    },
    Form3 {
        m: u64,
        pair: TermPair,
        strategy: PlaySet,
        alpha: Play,
    },
}

impl Judgment {
    pub fn form(&self) -> u8 {
        match self {
            Judgment::Form1 { .. } => 1,
            Judgment::Form2 { .. } => 2,
            Judgment::Form3 { .. } => 3,
        }
    }

    pub fn m(&self) -> u64 {
        match self {
            Judgment::Form1 { m, .. } | Judgment::Form2 { m, .. } | Judgment::Form3 { m, .. } => *m,
        }
    }

    pub fn pair(&self) -> &TermPair {
        match self {
            Judgment::Form1 { pair, .. }
            | Judgment::Form2 { pair, .. }
            | Judgment::Form3 { pair, .. } => pair,
        }
    }

    pub fn strategy(&self) -> &PlaySet {
        match self {
            Judgment::Form1 { strategy, .. }
            | Judgment::Form2 { strategy, .. }
            | Judgment::Form3 { strategy, .. } => strategy,
        }
    }

    pub fn display<'g>(&'g self, g: &'g Grammar) -> impl fmt::Display + 'g {
        DisplayJudgment { g, j: self }
    }

    pub fn to_doc(&self, g: &Grammar) -> JudgmentDoc {
        let base = JudgmentDoc {
            form: self.form(),
            m: self.m(),
            pair: self.pair().to_strings(g),
            strategy: self.strategy().to_lines(g),
            alpha: None,
            pair1: None,
            strategy1: None,
        };
        match self {
            Judgment::Form1 { .. } => base,
            Judgment::Form2 {
                alpha,
                pair1,
                strategy1,
                ..
            } => JudgmentDoc {
                alpha: Some(alpha.display(g).to_string()),
                pair1: Some(pair1.to_strings(g)),
                strategy1: Some(strategy1.to_lines(g)),
                ..base
            },
            Judgment::Form3 { alpha, .. } => JudgmentDoc {
                alpha: Some(alpha.display(g).to_string()),
                ..base
            },
        }
    }

    pub fn from_doc(g: &Grammar, doc: &JudgmentDoc) -> Result<Judgment, JudgmentDocError> {
        let pair = |p: &[String; 2]| g.parse_pair(&p[0], &p[1]).map_err(JudgmentDocError::Term);
        let strategy =
            |lines: &[String]| PlaySet::from_lines(g, lines).map_err(JudgmentDocError::Strategy);
        let alpha = |a: &Option<String>| -> Result<Play, JudgmentDocError> {
            let text = a.as_deref().ok_or(JudgmentDocError::Missing("alpha"))?;
            Play::parse(g, text).map_err(|source| {
                JudgmentDocError::Strategy(StrategyParseError { line: 1, source })
            })
        };
        let m = doc.m;
        let p = pair(&doc.pair)?;
        let s = strategy(&doc.strategy)?;
        match doc.form {
            1 => Ok(Judgment::Form1 {
                m,
                pair: p,
                strategy: s,
            }),
            2 => {
                let p1 = doc
                    .pair1
                    .as_ref()
                    .ok_or(JudgmentDocError::Missing("pair1"))?;
                let s1 = doc
                    .strategy1
                    .as_ref()
                    .ok_or(JudgmentDocError::Missing("strategy1"))?;
                Ok(Judgment::Form2 {
                    m,
                    pair: p,
                    strategy: s,
                    alpha: alpha(&doc.alpha)?,
                    pair1: pair(p1)?,
                    strategy1: strategy(s1)?,
                })
            }
            3 => Ok(Judgment::Form3 {
                m,
                pair: p,
                strategy: s,
                alpha: alpha(&doc.alpha)?,
            }),
            other => Err(JudgmentDocError::BadForm(other)),
        }
    }
}

struct DisplayJudgment<'g> {
    g: &'g Grammar,
    j: &'g Judgment,
}

impl fmt::Display for DisplayJudgment<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let g = self.g;
        let triple = |p: &TermPair, s: &PlaySet| {
            format!(
                "({}, {}, {})",
                p.left.display(g),
                p.right.display(g),
                s.display_set(g)
            )
        };
        let j = self.j;
        write!(f, "{} |== {}", j.m(), triple(j.pair(), j.strategy()))?;
        match j {
            Judgment::Form1 { .. } => Ok(()),
            Judgment::Form2 {
                alpha,
                pair1,
                strategy1,
                ..
            } => {
                write!(
                    f,
                    " ~> {} |== {}",
                    alpha.display(g),
                    triple(pair1, strategy1)
                )
            }
            Judgment::Form3 { alpha, .. } => write!(f, " ~> {} |== SUCC", alpha.display(g)),
        }
    }
}

/// JSON form of a judgment. Terms use the term syntax, strategies the
/// play-line syntax.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct JudgmentDoc {
    pub form: u8,
    pub m: u64,
    pub pair: [String; 2],
    pub strategy: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pair1: Option<[String; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub strategy1: Option<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum JudgmentDocError {
    #[error("unknown judgment form {0}")]
    BadForm(u8),
    #[error("missing field `{0}`")]
    Missing(&'static str),
    #[error(transparent)]
    Term(TermError),
    #[error(transparent)]
    Strategy(StrategyParseError),
}

/// Named side conditions of the three forms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SideCondition {
    /// `S` is a finite prefix of a Defender strategy w.r.t. `(T, T')`.
    StrategyIsPrefix,
    /// `S₁` is a finite prefix of a Defender strategy w.r.t. `(T₁, T'₁)`.
    TargetStrategyIsPrefix,
    /// `α ∈ S`.
    AlphaInStrategy,
    /// `α \ S = S₁`.
    Residual,
    /// `(T₁, T'₁) = NEXT((T, T'), α)`.
    NextPosition,
}

impl fmt::Display for SideCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SideCondition::StrategyIsPrefix => "S is a finite strategy prefix",
            SideCondition::TargetStrategyIsPrefix => "S1 is a finite strategy prefix",
            SideCondition::AlphaInStrategy => "α ∈ S",
            SideCondition::Residual => "α\\S = S1",
            SideCondition::NextPosition => "(T1,T1') = NEXT((T,T'),α)",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct JudgmentFailure {
    pub condition: SideCondition,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct JudgmentVerdict {
    pub valid: bool,
    pub failures: Vec<JudgmentFailure>,
}

impl JudgmentVerdict {
    pub fn failed(&self, c: SideCondition) -> bool {
        self.failures.iter().any(|f| f.condition == c)
    }
}

fn prefix_failure(g: &Grammar, v: &StrategyVerdict) -> String {
    let r = v.report(g);
    format!(
        "{} violated at {}",
        r.violated_condition
            .map_or("?".to_string(), |c| c.to_string()),
        r.witness.unwrap_or_else(|| "ε".into())
    )
}

/// Checks every side condition of `j`, reporting all failures.
pub fn check_judgment(g: &Grammar, j: &Judgment) -> JudgmentVerdict {
    let mut failures = Vec::new();
    let mut fail = |condition, detail: String| failures.push(JudgmentFailure { condition, detail });

    let v = check_finite_prefix(g, j.pair(), j.strategy());
    if !v.accepted {
        fail(SideCondition::StrategyIsPrefix, prefix_failure(g, &v));
    }
    match j {
        Judgment::Form1 { .. } => {}
        Judgment::Form3 {
            strategy, alpha, ..
        } => {
            if !strategy.contains(alpha) {
                fail(
                    SideCondition::AlphaInStrategy,
                    format!("{} ∉ S", alpha.display(g)),
                );
            }
        }
        Judgment::Form2 {
            pair,
            strategy,
            alpha,
            pair1,
            strategy1,
            ..
        } => {
            let v1 = check_finite_prefix(g, pair1, strategy1);
            if !v1.accepted {
                fail(
                    SideCondition::TargetStrategyIsPrefix,
                    prefix_failure(g, &v1),
                );
            }
            match strategy.residual(alpha) {
                Err(_) => fail(
                    SideCondition::AlphaInStrategy,
                    format!("{} ∉ S", alpha.display(g)),
                ),
                Ok(res) if &res != strategy1 => fail(
                    SideCondition::Residual,
                    format!(
                        "α\\S = {} but S1 = {}",
                        res.display_set(g),
                        strategy1.display_set(g)
                    ),
                ),
                Ok(_) => {}
            }
            match next(g, pair, alpha) {
                Err(e) => fail(SideCondition::NextPosition, e.to_string()),
                Ok(q) if &q != pair1 => fail(
                    SideCondition::NextPosition,
                    format!(
                        "NEXT is {} but the judgment names {}",
                        q.display(g),
                        pair1.display(g)
                    ),
                ),
                Ok(_) => {}
            }
        }
    }
    JudgmentVerdict {
        valid: failures.is_empty(),
        failures,
    }
}

/// Parameters `(T₀, T'₀, S₀, B)` of one formal system.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SystemParams {
    t0: TermPair,
    s0: PlaySet,
    basis: Basis,
}

impl SystemParams {
    /// Fails unless `s0` is a finite strategy prefix w.r.t. `t0`.
    pub fn new(
        g: &Grammar,
        t0: TermPair,
        s0: PlaySet,
        basis: Basis,
    ) -> Result<Self, StrategyVerdict> {
        let v = check_finite_prefix(g, &t0, &s0);
        if !v.accepted {
            return Err(v);
        }
        Ok(SystemParams { t0, s0, basis })
    }

    pub fn t0(&self) -> &TermPair {
        &self.t0
    }

    pub fn s0(&self) -> &PlaySet {
        &self.s0
    }

    pub fn basis(&self) -> &Basis {
        &self.basis
    }

    /// The single axiom `0 |== (T₀, T'₀, S₀)`.
    pub fn axiom(&self) -> Judgment {
        Judgment::Form1 {
            m: 0,
            pair: self.t0.clone(),
            strategy: self.s0.clone(),
        }
    }
}

/// Whether `j` is the axiom of the system given by `params`.
pub fn check_axiom(params: &SystemParams, j: &Judgment) -> bool {
    *j == params.axiom()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::repro::{counterexample_basis, counterexample_grammar, proof_strategies};

    fn fixtures() -> (Grammar, TermPair, PlaySet, PlaySet) {
        let g = counterexample_grammar();
        let st = proof_strategies(&g);
        let p = g.parse_pair("A(bot)", "B(bot)").unwrap();
        (
            g,
            p,
            st.finite("S").unwrap().clone(),
            st.finite("S1").unwrap().clone(),
        )
    }

    #[test]
    fn form1_axiom_is_valid() {
        let (g, p, s, _) = fixtures();
        let j = Judgment::Form1 {
            m: 0,
            pair: p,
            strategy: s,
        };
        assert!(check_judgment(&g, &j).valid);
    }

    #[test]
    fn form2_residual_step() {
        let (g, p, s, s1) = fixtures();
        let alpha = Play::parse(&g, "r1:r3").unwrap();
        let cc = g.parse_pair("C(bot)", "C(bot)").unwrap();
        let j = Judgment::Form2 {
            m: 0,
            pair: p.clone(),
            strategy: s.clone(),
            alpha: alpha.clone(),
            pair1: cc.clone(),
            strategy1: s1.clone(),
        };
        assert!(check_judgment(&g, &j).valid, "{:?}", check_judgment(&g, &j));

        // Wrong target position.
        let j = Judgment::Form2 {
            m: 0,
            pair: p.clone(),
            strategy: s.clone(),
            alpha: alpha.clone(),
            pair1: g.parse_pair("C(bot)", "C(L1)").unwrap(),
            strategy1: s1,
        };
        let v = check_judgment(&g, &j);
        assert!(!v.valid);
        assert!(v.failed(SideCondition::NextPosition));
        assert!(!v.failed(SideCondition::Residual));

        // Wrong residual.
        let j = Judgment::Form2 {
            m: 0,
            pair: p,
            strategy: s,
            alpha,
            pair1: cc,
            strategy1: PlaySet::new(),
        };
        let v = check_judgment(&g, &j);
        assert!(v.failed(SideCondition::Residual));
        assert!(!v.failed(SideCondition::NextPosition));
    }

    #[test]
    fn form3_needs_alpha_in_s() {
        let (g, p, s, _) = fixtures();
        let j = Judgment::Form3 {
            m: 0,
            pair: p.clone(),
            strategy: s.clone(),
            alpha: Play::parse(&g, "r14:r14").unwrap(),
        };
        let v = check_judgment(&g, &j);
        assert!(!v.valid);
        assert_eq!(v.failures.len(), 1);
        assert_eq!(v.failures[0].condition, SideCondition::AlphaInStrategy);
        let j = Judgment::Form3 {
            m: 5,
            pair: p,
            strategy: s,
            alpha: Play::empty(),
        };
        assert!(check_judgment(&g, &j).valid);
    }

    #[test]
    fn axiom_matching() {
        let (g, p, s, _) = fixtures();
        let params = SystemParams::new(&g, p.clone(), s.clone(), counterexample_basis(&g)).unwrap();
        assert!(check_axiom(
            &params,
            &Judgment::Form1 {
                m: 0,
                pair: p.clone(),
                strategy: s.clone()
            }
        ));
        assert!(!check_axiom(
            &params,
            &Judgment::Form1 {
                m: 1,
                pair: p,
                strategy: s
            }
        ));
        let id_c1 = proof_strategies(&g).finite("Id_C,1").unwrap().clone();
        let c = g.parse_pair("C(L1)", "C(L1)").unwrap();
        assert!(!check_axiom(
            &params,
            &Judgment::Form1 {
                m: 0,
                pair: c,
                strategy: id_c1
            }
        ));
    }

    #[test]
    fn params_reject_bad_s0() {
        let (g, p, _, s1) = fixtures();
        assert!(SystemParams::new(&g, p, s1, Basis::default()).is_err());
    }

    #[test]
    fn doc_round_trip() {
        let (g, p, s, s1) = fixtures();
        let j = Judgment::Form2 {
            m: 2,
            pair: p,
            strategy: s,
            alpha: Play::parse(&g, "r1:r3").unwrap(),
            pair1: g.parse_pair("C(bot)", "C(bot)").unwrap(),
            strategy1: s1,
        };
        let doc = j.to_doc(&g);
        let json = serde_json::to_string(&doc).unwrap();
        let back: JudgmentDoc = serde_json::from_str(&json).unwrap();
        assert_eq!(Judgment::from_doc(&g, &back).unwrap(), j);
        assert_eq!(
            j.display(&g).to_string(),
            "2 |== (A(bot), B(bot), {ε, r1:r3, r2:r4, r1:r3 r5:r6, r1:r3 r6:r5, r2:r4 r7:r8, r2:r4 r7:r8 r9:r10}) ~> r1:r3 |== (C(bot), C(bot), {ε, r5:r6, r6:r5})"
        );
        let bad = JudgmentDoc { form: 4, ..doc };
        assert_eq!(
            Judgment::from_doc(&g, &bad),
            Err(JudgmentDocError::BadForm(4))
        );
    }
}
