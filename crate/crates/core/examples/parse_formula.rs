//! Parse a sentence, print it back, and show its alternation normal form.

use hyperskolem::syntax::{normalize_prefix, parse_formula};

fn main() -> hyperskolem::Result<()> {
    let src = std::env::args().nth(1).unwrap_or_else(|| "exists p. forall q. exists r. (X a[p]) -> ((F a[q]) <-> (X a[r]))".into());
    let f = parse_formula(&src)?;
    println!("parsed:   {f}");
    println!("negated:  {}", f.negate());
    let form = normalize_prefix(&f);
    println!("blocks:   {}", form.k());
    for (i, b) in form.blocks.iter().enumerate() {
        println!("  {i}: {} {}", b.quantifier.keyword(), b.vars.join(", "));
    }
    if !form.dummies.is_empty() {
        println!("dummies:  {}", form.dummies.join(", "));
    }
    Ok(())
}
