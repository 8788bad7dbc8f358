use std::path::PathBuf;
use std::process::{Command, Output};

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hyperskolem")).args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn s(p: &std::path::Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn check_reports_holds_and_fails() {
    let ts = data("free.ts");
    let o = run(&["check", s(&ts), s(&data("delayed.hltl"))]);
    assert_eq!((code(&o), stdout(&o).trim()), (0, "HOLDS"));
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("all_equal.hltl");
    std::fs::write(&f, "forall p. forall q. G (a[p] <-> a[q])").unwrap();
    let o = run(&["check", s(&ts), s(&f), "--json"]);
    assert_eq!(code(&o), 1);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!((v["schema"].as_u64(), v["command"].as_str(), v["status"].as_str()), (Some(1), Some("check"), Some("FAILS")));
}

#[test]
fn skolem_yes_no_and_simulate() {
    let dir = tempfile::tempdir().unwrap();
    let ts = data("free.ts");
    let o = run(&["skolem", s(&ts), s(&data("delayed.hltl")), "-o", s(&dir.path().join("none.json"))]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("NO-COMPUTABLE-WITNESS"));
    assert!(!dir.path().join("none.json").exists());

    let w = dir.path().join("copy.json");
    let eq = dir.path().join("eq.json");
    let game = dir.path().join("game.json");
    let strat = dir.path().join("strategy.json");
    let o = run(&[
        "skolem", s(&ts), s(&data("copy.hltl")), "-o", s(&w),
        "--dump-equivalence", s(&eq), "--dump-game", s(&game), "--dump-strategy", s(&strat), "--json",
    ]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["status"], "YES");
    assert_eq!(v["summary"]["ell"], 2);
    for p in [&w, &eq, &game, &strat] {
        serde_json::from_str::<serde_json::Value>(&std::fs::read_to_string(p).unwrap()).unwrap();
    }

    let o = run(&["simulate", s(&w), s(&ts), "p={}({a}{}{a})"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o), "q = {}({a}{}{a})\nPASS\n");
    let o = run(&["simulate", s(&w), s(&ts), "p=({a})"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("outside the system") || stdout(&o).ends_with("PASS\n"));
    let o = run(&["simulate", s(&w), s(&ts), "r={}({})"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn failing_sentence_yields_counterexample_functions() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("all_equal.hltl");
    std::fs::write(&f, "forall p. forall q. G (a[p] <-> a[q])").unwrap();
    let o = run(&["skolem", s(&data("free.ts")), s(&f), "-o", s(&dir.path().join("w.json"))]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert!(stdout(&o).contains("negation"));
}

#[test]
fn usage_parse_and_budget_errors() {
    let ts = data("free.ts");
    assert_eq!(code(&run(&["frobnicate"])), 2);
    assert_eq!(code(&run(&["check", s(&ts)])), 2);
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.hltl");
    std::fs::write(&bad, "forall p. a[p] &&").unwrap();
    let o = run(&["check", s(&ts), s(&bad), "--json"]);
    assert_eq!(code(&o), 2);
    assert!(stdout(&o).contains("\"ERROR\""));
    assert_eq!(code(&run(&["check", s(&dir.path().join("missing.ts")), s(&bad)])), 2);
    let o = run(&["skolem", s(&ts), s(&data("copy.hltl")), "--budget-states", "3", "-o", s(&dir.path().join("w.json"))]);
    assert_eq!(code(&o), 3, "{}", stdout(&o));
    assert!(stdout(&o).starts_with("BUDGET"));
}
