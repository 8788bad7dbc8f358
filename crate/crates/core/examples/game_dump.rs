//! Build the explicit block game for a two-block sentence and play it randomly.

use hyperskolem::game::build_game;
use hyperskolem::pipeline::Instance;
use hyperskolem::syntax::parse_formula;
use hyperskolem::ts::TransitionSystem;
use rand::SeedableRng;

fn main() -> hyperskolem::Result<()> {
    let ts = TransitionSystem::parse(include_str!("../data/free.ts"))?;
    let inst = Instance::prepare(&ts, &parse_formula(include_str!("../data/copy.hltl"))?, 1_000_000)?;
    let game = inst.game()?;
    let g = build_game(&game, 1_000_000)?;
    let edges: usize = g.edges.iter().map(Vec::len).sum();
    println!("positions {}, edges {}", g.positions.len(), edges);
    println!("turn-based {}, hierarchical {}", g.is_turn_based(), g.is_hierarchical());

    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
    for _ in 0..5 {
        let (prefix, cycle) = game.sample_play(&mut rng, true)?;
        println!(
            "play: prefix {:2}, cycle {:2}, positionwise {:5}, on the outcome {:5}",
            prefix.len(),
            cycle.len(),
            game.winning_positionwise(&cycle),
            game.winning_subsequence(&cycle)
        );
    }
    if let Some(path) = std::env::args().nth(1) {
        std::fs::write(&path, g.to_json())?;
        println!("wrote {path}");
    }
    Ok(())
}
