//! Solve the block game with hierarchical information and check the profile.

use hyperskolem::pipeline::Instance;
use hyperskolem::solver::{solve_hierarchical, verify_profile, SolveOptions};
use hyperskolem::syntax::parse_formula;
use hyperskolem::ts::TransitionSystem;

fn main() -> hyperskolem::Result<()> {
    let ts = TransitionSystem::parse(include_str!("../data/free.ts"))?;
    for src in [include_str!("../data/delayed.hltl"), include_str!("../data/copy.hltl")] {
        let inst = Instance::prepare(&ts, &parse_formula(src)?, 1_000_000)?;
        let game = inst.game()?;
        match solve_hierarchical(&game, SolveOptions::default())? {
            None => println!("{}: the existential players lose", inst.formula),
            Some(profile) => {
                let sizes: Vec<usize> = profile.machines.iter().map(|m| m.len()).collect();
                println!("{}: winning profile with machine sizes {sizes:?}", inst.formula);
                println!("  verified: {}", verify_profile(&game, &profile, 1_000_000)?);
            }
        }
    }
    Ok(())
}
