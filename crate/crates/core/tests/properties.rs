mod common;

use common::{random_grammar, random_pair, random_strategy, rng};
use fog_core::game::{EqLevel, Play};
use fog_core::judgment::{Judgment, JudgmentDoc};
use fog_core::repro::counterexample_grammar;
use fog_core::strategy::{extension_leq, make_playset, PlaySet};
use proptest::prelude::*;

fn playset_from_seed(seed: u64) -> (PlaySet, Vec<PlaySet>) {
    let mut r = rng(seed);
    let g = random_grammar(&mut r, false);
    let p = random_pair(&mut r, &g, 2);
    let s = random_strategy(&mut r, &g, &p, 4, 0.2);
    let cuts = (0..=s.depth()).map(|n| s.truncate(n)).collect();
    (s, cuts)
}

proptest! {
    #[test]
    fn extension_is_a_partial_order(a in any::<u64>(), b in any::<u64>()) {
        let (s, mut all) = playset_from_seed(a);
        let (t, more) = playset_from_seed(b);
        all.extend(more);
        all.push(s);
        all.push(t);
        for x in &all {
            prop_assert!(extension_leq(x, x));
            for y in &all {
                if extension_leq(x, y) && extension_leq(y, x) {
                    prop_assert_eq!(x, y);
                }
                for z in &all {
                    if extension_leq(x, y) && extension_leq(y, z) {
                        prop_assert!(extension_leq(x, z));
                    }
                }
            }
        }
    }

    #[test]
    fn truncations_are_extended_by_the_whole(seed in any::<u64>()) {
        let (s, cuts) = playset_from_seed(seed);
        for c in &cuts {
            prop_assert!(extension_leq(c, &s));
        }
    }

    #[test]
    fn prefix_closure_is_idempotent(seed in any::<u64>()) {
        let (s, _) = playset_from_seed(seed);
        let plays: Vec<Play> = s.maximal_plays();
        let once = make_playset(&plays);
        prop_assert_eq!(&once, &s);
        prop_assert_eq!(make_playset(&once.plays()), once);
    }

    #[test]
    fn eq_level_text_round_trip(n in 0u32..1000, kind in 0u8..3) {
        let l = match kind {
            0 => EqLevel::Exact(n),
            1 => EqLevel::AtLeast(n),
            _ => EqLevel::Infinite,
        };
        prop_assert_eq!(l.to_string().parse::<EqLevel>().unwrap(), l);
        let json = serde_json::to_string(&l).unwrap();
        prop_assert_eq!(serde_json::from_str::<EqLevel>(&json).unwrap(), l);
    }
}

#[test]
fn judgment_json_round_trip() {
    let g = counterexample_grammar();
    let s = PlaySet::from_lines(&g, &["r1:r3 r5:r6", "r2:r4"]).unwrap();
    let j = Judgment::Form3 {
        m: 7,
        pair: g.parse_pair("A(bot)", "B(bot)").unwrap(),
        strategy: s,
        alpha: Play::parse(&g, "r1:r3").unwrap(),
    };
    let doc: JudgmentDoc =
        serde_json::from_str(&serde_json::to_string(&j.to_doc(&g)).unwrap()).unwrap();
    assert_eq!(Judgment::from_doc(&g, &doc).unwrap(), j);
}
