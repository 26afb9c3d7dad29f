use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command as Process;

use clap::Parser;
use fog_cli::{dispatch, Cli, LevelReport, Outcome, PlayReport, ValidateReport};
use fog_core::game::EqLevel;
use fog_core::repro::{Report, COUNTEREXAMPLE_SOURCE};
use fog_core::strategy::{Condition, VerdictReport};
use tempfile::TempDir;

struct Files {
    _dir: TempDir,
    grammar: PathBuf,
    s: PathBuf,
    dir: PathBuf,
}

fn files() -> Files {
    let dir = TempDir::new().unwrap();
    let grammar = dir.path().join("g.fog");
    fs::write(&grammar, COUNTEREXAMPLE_SOURCE).unwrap();
    let s = dir.path().join("s.strat");
    fs::write(&s, "# S\nr1:r3 r5:r6\nr1:r3 r6:r5\n\nr2:r4 r7:r8 r9:r10\n").unwrap();
    let path = dir.path().to_path_buf();
    Files {
        _dir: dir,
        grammar,
        s,
        dir: path,
    }
}

fn run(args: &[&str], stdin: &str) -> (i32, String, String) {
    let cli = Cli::try_parse_from(std::iter::once("fog").chain(args.iter().copied())).unwrap();
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = dispatch(&cli, stdin.as_bytes(), &mut out, &mut err);
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn eqlevel_text_and_json() {
    let f = files();
    let (code, out, _) = run(&["eqlevel", p(&f.grammar), "A(bot)", "B(bot)"], "");
    assert_eq!((code, out.trim()), (0, "Exact(3)"));
    let (code, out, _) = run(&["eqlevel", p(&f.grammar), "bot", "bot"], "");
    assert_eq!((code, out.trim()), (0, "Infinite"));
    let (code, out, _) = run(&["--json", "eqlevel", p(&f.grammar), "E(L1)", "E(⊥)"], "");
    assert_eq!(code, 0);
    let r: LevelReport = serde_json::from_str(&out).unwrap();
    assert_eq!(r.level, EqLevel::Exact(1));
    assert_eq!(r.pair, ["E(L1)".to_string(), "E(bot)".to_string()]);
    let (code, _, err) = run(&["eqlevel", p(&f.grammar), "A(bot", "B(bot)"], "");
    assert_eq!(code, 2);
    assert!(err.starts_with("error: "));
}

#[test]
fn check_strategy_modes() {
    let f = files();
    let base = ["check-strategy", p(&f.grammar), "A(bot)", "B(bot)", p(&f.s)];
    let (code, out, _) = run(&base, "");
    assert_eq!((code, out.trim()), (0, "accepted, n=3"));
    let (code, out, _) = run(&[&base[..], &["--mode", "winning", "--json"]].concat(), "");
    assert_eq!(code, 1);
    let r: VerdictReport = serde_json::from_str(&out).unwrap();
    assert_eq!(r.violated_condition, Some(Condition::Dq4Winning));
    assert_eq!(r.witness.as_deref(), Some("r1:r3 r5:r6"));

    let cut = f.dir.join("cut.strat");
    fs::write(&cut, "r1:r3 r5:r6\nr2:r4 r7:r8 r9:r10\n").unwrap();
    let (code, out, _) = run(
        &[
            "--json",
            "check-strategy",
            p(&f.grammar),
            "A(bot)",
            "B(bot)",
            p(&cut),
        ],
        "",
    );
    assert_eq!(code, 1);
    assert_eq!(
        out.split_whitespace().collect::<String>(),
        r#"{"accepted":false,"violated_condition":"DQ4","witness":"r1:r3"}"#
    );

    let (code, _, _) = run(
        &[
            "check-strategy",
            p(&f.grammar),
            "D(L1)",
            "D(L1)",
            "@identity",
            "--mode",
            "winning",
        ],
        "",
    );
    assert_eq!(code, 0);
    let (code, out, _) = run(
        &[
            "--depth",
            "1",
            "check-strategy",
            p(&f.grammar),
            "C(L1)",
            "C(L1)",
            "@identity",
        ],
        "",
    );
    assert_eq!((code, out.trim()), (0, "accepted, n=1"));
    let (code, _, err) = run(
        &[
            "check-strategy",
            p(&f.grammar),
            "C(L1)",
            "D(L1)",
            "@identity",
        ],
        "",
    );
    assert_eq!(code, 2);
    assert!(err.contains("identical"));

    let bad = f.dir.join("bad.strat");
    fs::write(&bad, "r1:r3\nr1-r3\n").unwrap();
    let (code, _, err) = run(
        &["check-strategy", p(&f.grammar), "A(bot)", "B(bot)", p(&bad)],
        "",
    );
    assert_eq!(code, 2);
    assert!(err.contains("line 2"), "{err}");
}

#[test]
fn validate_exit_codes() {
    let f = files();
    let (code, out, _) = run(&["--json", "validate", p(&f.grammar)], "");
    assert_eq!(code, 0);
    let r: ValidateReport = serde_json::from_str(&out).unwrap();
    assert_eq!((r.nonterminals, r.rules), (10, 14));
    let bad = f.dir.join("bad.fog");
    fs::write(
        &bad,
        "actions a\nlabels x->a\nnt A:1 C:1\nrule r1 A(v) x C(v,v)\n",
    )
    .unwrap();
    let (code, out, _) = run(&["--json", "validate", p(&bad)], "");
    assert_eq!(code, 1);
    let r: ValidateReport = serde_json::from_str(&out).unwrap();
    assert!(!r.valid);
    assert_eq!(r.diagnostics[0].line, 4);
    let (code, _, _) = run(&["eqlevel", p(&bad), "A(bot)", "A(bot)"], "");
    assert_eq!(code, 2);
    let missing = f.dir.join("missing.fog");
    assert_eq!(run(&["validate", p(&missing)], "").0, 2);
}

#[test]
fn gen_family_round_trips_through_validate() {
    let f = files();
    let out_path = f.dir.join("fam.fog");
    let (code, _, _) = run(&["gen-family", "3", p(&out_path)], "");
    assert_eq!(code, 0);
    let (code, out, _) = run(&["validate", p(&out_path)], "");
    assert_eq!((code, out.trim()), (0, "ok: 16 nonterminals, 20 rules"));
    let (code, out, _) = run(&["eqlevel", p(&out_path), "A(bot)", "B(bot)"], "");
    assert_eq!((code, out.trim()), (0, "Exact(6)"));
    assert_eq!(run(&["gen-family", "0", "-"], "").0, 2);
}

#[test]
fn repro_json_schema() {
    let (code, out, _) = run(&["--json", "repro", "--k-range", "1..2"], "");
    let r: Report = serde_json::from_str(&out).unwrap();
    assert_eq!(code, if r.all_pass { 0 } else { 1 });
    assert!(r.claims.iter().any(|c| c.id == "family-k2"));
    assert!(!r.claims.iter().any(|c| c.id == "family-k3"));
    let again = serde_json::to_string_pretty(&r).unwrap();
    assert_eq!(again.trim(), out.trim());
    assert!(Cli::try_parse_from(["fog", "repro", "--k-range", "0..2"]).is_err());
}

#[test]
fn play_against_s() {
    let f = files();
    let (code, out, _) = run(
        &["play", p(&f.grammar), "A(bot)", "B(bot)", p(&f.s)],
        "L r1\n",
    );
    assert_eq!(code, 0);
    assert!(
        out.contains("Defender answers r3 -> (C(bot), C(bot))"),
        "{out}"
    );
    assert!(out.contains("session ended after 1 rounds"));

    let (_, out, _) = run(
        &["--json", "play", p(&f.grammar), "A(bot)", "B(bot)", p(&f.s)],
        "L r1\nR r6\nR r13\n",
    );
    let r: PlayReport = serde_json::from_str(&out).unwrap();
    assert_eq!(r.outcome, Outcome::AttackerWins);
    assert_eq!(r.play, "r1:r3 r5:r6");
    assert_eq!(r.rounds, 2);
}

#[test]
fn play_edge_cases() {
    let f = files();
    let (_, out, _) = run(&["--json", "play", p(&f.grammar), "bot", "bot"], "L r1\n");
    let r: PlayReport = serde_json::from_str(&out).unwrap();
    assert_eq!((r.outcome, r.rounds), (Outcome::DeadPosition, 0));

    let empty = f.dir.join("empty.strat");
    fs::write(&empty, "").unwrap();
    for attack in ["L r12", "L r13", "R r12", "R r13"] {
        let input = format!("nonsense\nL r1\n{attack}\n");
        let (_, out, _) = run(
            &["play", p(&f.grammar), "E(bot)", "E(bot)", p(&empty)],
            &input,
        );
        assert!(out.contains("illegal move"));
        assert!(out.contains("Attacker wins in round 1"), "{out}");
    }

    // Without a strategy Defender searches and keeps (C, C) identical.
    let (_, out, _) = run(
        &["--json", "play", p(&f.grammar), "A(bot)", "B(bot)"],
        "L r1\nL r5\nL r11\n",
    );
    let r: PlayReport = serde_json::from_str(&out).unwrap();
    assert_eq!(r.play, "r1:r3 r5:r5 r11:r11");
    assert_eq!(r.outcome, Outcome::DeadPosition);

    // A set that is not a quasi-strategy is refused.
    let (code, _, _) = run(&["play", p(&f.grammar), "A(bot)", "B(bot)", p(&empty)], "");
    assert_eq!(code, 0);
    let half = f.dir.join("half.strat");
    fs::write(&half, "r1:r3 r5:r6\n").unwrap();
    let (code, _, err) = run(&["play", p(&f.grammar), "A(bot)", "B(bot)", p(&half)], "");
    assert_eq!(code, 2);
    assert!(err.contains("DQ4"), "{err}");
}

#[test]
fn binary_exit_statuses() {
    let f = files();
    let bin = env!("CARGO_BIN_EXE_fog");
    let st = Process::new(bin)
        .args(["eqlevel", p(&f.grammar), "A(bot)", "B(bot)"])
        .output()
        .unwrap();
    assert_eq!(st.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&st.stdout).trim(), "Exact(3)");
    let st = Process::new(bin)
        .args(["eqlevel", p(&f.grammar), "Z", "B(bot)"])
        .output()
        .unwrap();
    assert_eq!(st.status.code(), Some(2));
    let st = Process::new(bin).args(["frobnicate"]).output().unwrap();
    assert_eq!(st.status.code(), Some(2));
}
