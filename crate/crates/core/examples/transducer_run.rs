//! Extract a transducer and run it on a few lasso inputs.

use hyperskolem::pipeline::{decide, Decision, Instance};
use hyperskolem::session::{format_lasso, parse_lasso};
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
    let t = &witness.transducers[0];
    println!("{} reads {} with declared delay {}", t.outputs.join(","), t.inputs.join(","), t.delay);
    for input in ["{}({a})", "{}({a}{}{})", "{}{a}{a}({})"] {
        let (out, lag) = t.run_lasso(&parse_lasso(&ts, input)?)?;
        println!("  {input:14} -> {:14} largest lag {lag}", format_lasso(&ts, &out));
    }
    Ok(())
}
