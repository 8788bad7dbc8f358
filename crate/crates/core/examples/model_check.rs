//! Model-check a few sentences against the system where every trace starts
//! with `{}` and continues arbitrarily.

use hyperskolem::modelcheck::model_check;
use hyperskolem::syntax::parse_formula;
use hyperskolem::ts::TransitionSystem;

const SYSTEM: &str = include_str!("../data/free.ts");

fn main() -> hyperskolem::Result<()> {
    let ts = TransitionSystem::parse(SYSTEM)?;
    for src in [
        "forall p. exists q. (F a[p]) <-> (X a[q])",
        "forall p. exists q. G (a[p] <-> a[q])",
        "forall p. forall q. G (a[p] <-> a[q])",
        "exists p. forall q. X a[p] && (a[q] -> a[p])",
    ] {
        let holds = model_check(&ts, &parse_formula(src)?, 1_000_000)?;
        println!("{:5}  {src}", if holds { "holds" } else { "fails" });
    }
    Ok(())
}
