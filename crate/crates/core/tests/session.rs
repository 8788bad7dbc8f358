mod common;

use std::collections::BTreeMap;

use common::*;
use hyperskolem::automata::Lasso;
use hyperskolem::session::{letter_names, simulate, ExplanationSession, NamedBlock};
use hyperskolem::ts::TransitionSystem;
use hyperskolem::Error;

fn copy_session() -> ExplanationSession {
    let ts = free_ts();
    let (_, w) = witness_for(&ts, COPY);
    ExplanationSession::open(w, ts, BUDGET).unwrap()
}

fn named(ts: &TransitionSystem, letters: &[u32]) -> NamedBlock {
    letters.iter().map(|&l| letter_names(ts, l)).collect()
}

#[test]
fn stepping_matches_batch_simulation() {
    let mut s = copy_session();
    let ts = s.system.clone();
    let ell = s.witness.schedule.ell;
    let input = Lasso::new(vec![0, 1, 1], vec![0, 1, 0]);
    let (batch, _) = simulate(&s.witness, &ts, &BTreeMap::from([("p".to_string(), input.clone())])).unwrap();
    let mut streamed: Vec<u32> = Vec::new();
    for b in 0..6 {
        let block: Vec<u32> = (0..ell).map(|t| input.at(b * ell + t)).collect();
        let r = s.step(&[named(&ts, &block)]).unwrap();
        for blk in &r.outputs["q"] {
            for l in blk {
                streamed.push(l.iter().map(|n| 1 << ts.prop_index(n).unwrap()).sum());
            }
        }
        assert!(r.monitor.in_system["p"]);
    }
    assert!(!streamed.is_empty());
    assert_eq!(streamed, batch["q"].take(streamed.len()));
    assert_eq!(s.history.len(), 6);
}

#[test]
fn malformed_steps_leave_the_session_unchanged() {
    let mut s = copy_session();
    let ts = s.system.clone();
    s.step(&[named(&ts, &[0, 1])]).unwrap();
    let before = (s.history.clone(), s.monitor());
    assert!(matches!(s.step(&[named(&ts, &[0])]), Err(Error::LengthMismatch(_))));
    assert!(matches!(s.step(&[vec![vec!["b".to_string()], vec![]]]), Err(Error::InvalidLetter(_))));
    assert!(s.step(&[named(&ts, &[0, 1]), named(&ts, &[0, 1])]).is_err());
    assert_eq!((s.history.clone(), s.monitor()), before);
}

#[test]
fn leaving_the_system_is_reported() {
    let mut s = copy_session();
    let ts = s.system.clone();
    let r = s.step(&[named(&ts, &[1, 1])]).unwrap();
    assert!(!r.monitor.in_system["p"]);
    let r = s.step(&[named(&ts, &[0, 0])]).unwrap();
    assert!(!r.monitor.in_system["p"]);
}

#[test]
fn suggestions_start_inside_the_system() {
    let s = copy_session();
    let sug = s.suggest_universal(8);
    let blocks = &sug["p"];
    assert!(!blocks.is_empty());
    assert!(blocks.iter().all(|b| b[0].is_empty()));
}

#[test]
fn opening_against_another_system_fails() {
    let ts = free_ts();
    let (_, w) = witness_for(&ts, COPY);
    let other = TransitionSystem::parse("aps: a\nvertex v {} initial\nedge v v\n").unwrap();
    assert!(matches!(ExplanationSession::open(w, other, BUDGET), Err(Error::Digest(_))));
}
