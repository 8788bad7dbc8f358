//! Round-trip a witness through JSON and verify it against the automaton.

use hyperskolem::pipeline::{decide, Decision, Instance};
use hyperskolem::solver::SolveOptions;
use hyperskolem::syntax::parse_formula;
use hyperskolem::transducer::{verify_skolem, SkolemWitness};
use hyperskolem::ts::TransitionSystem;

fn main() -> hyperskolem::Result<()> {
    let ts = TransitionSystem::parse(include_str!("../data/free.ts"))?;
    let inst = Instance::prepare(&ts, &parse_formula(include_str!("../data/lookahead.hltl"))?, 1_000_000)?;
    let Decision::Yes { witness, .. } = decide(&inst, SolveOptions::default())? else {
        println!("no witness");
        return Ok(());
    };
    let text = witness.to_json();
    let back = SkolemWitness::from_json(&text)?;
    back.check_system(&ts)?;
    println!("witness: {} bytes, {} transducers", text.len(), back.transducers.len());
    for t in &back.transducers {
        println!("  {} <- {:?}{}", t.outputs.join(","), t.inputs, if t.padding { " (padding)" } else { "" });
    }
    println!("verified: {}", verify_skolem(&back, &inst.outcome.dpa, &ts, 1_000_000)?);
    Ok(())
}
