//! Step an explanation session block by block.

use hyperskolem::pipeline::{decide, Decision, Instance};
use hyperskolem::session::ExplanationSession;
use hyperskolem::solver::SolveOptions;
use hyperskolem::syntax::parse_formula;
use hyperskolem::ts::TransitionSystem;

fn main() -> hyperskolem::Result<()> {
    let ts = TransitionSystem::parse(include_str!("../data/free.ts"))?;
    let inst = Instance::prepare(&ts, &parse_formula(include_str!("../data/copy.hltl"))?, 1_000_000)?;
    let Decision::Yes { witness, .. } = decide(&inst, SolveOptions::default())? else {
        println!("no witness");
        return Ok(());
    };
    let mut s = ExplanationSession::open(witness, ts, 1_000_000)?;
    println!("inputs {:?}, outputs {:?}", s.inputs(), s.outputs());
    for _ in 0..4 {
        let suggested = s.suggest_universal(4);
        let pick: Vec<_> = s.inputs().iter().map(|v| suggested[v].last().cloned().unwrap_or_default()).collect();
        let r = s.step(&pick)?;
        println!("in {pick:?} -> out {:?}, can accept {}", r.outputs, r.monitor.can_accept);
    }
    Ok(())
}
