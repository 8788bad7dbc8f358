//! Index of every level of the tuple equivalence and the resulting block length.

use hyperskolem::pipeline::Instance;
use hyperskolem::syntax::parse_formula;
use hyperskolem::ts::TransitionSystem;

fn main() -> hyperskolem::Result<()> {
    let ts = TransitionSystem::parse(include_str!("../data/free.ts"))?;
    for src in [include_str!("../data/delayed.hltl"), include_str!("../data/copy.hltl"), include_str!("../data/lookahead.hltl")] {
        let inst = Instance::prepare(&ts, &parse_formula(src)?, 1_000_000)?;
        let d = &inst.equivalence;
        println!("{}", inst.formula);
        println!("  automaton states {}, index per level {:?}, log2 bound {:.1}", d.automaton_states, d.index, d.index_bound_log2);
        println!("  block length {} (type DFA has {} states), longest word in a finite class {:?}", d.ell, d.type_dfa_states, d.witness);
        println!("  schedule {:?}", inst.schedule.delta);
    }
    Ok(())
}
