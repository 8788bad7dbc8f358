//! LTL to Büchi, Büchi to parity, and a lasso-by-lasso comparison of the two.

use hyperskolem::automata::{determinize, ltl_to_nba, HoaExport, Lasso};
use hyperskolem::syntax::parse_formula;
use rand::SeedableRng;

fn main() -> hyperskolem::Result<()> {
    let f = parse_formula("forall p. F G a[p]")?;
    let aps = vec!["a".to_string()];
    let nba = ltl_to_nba(&f.matrix, &f.variables(), &aps)?;
    let dpa = determinize(&nba, 100_000)?;
    println!("NBA states: {}, DPA states: {}, colors: {}", nba.len(), dpa.len(), dpa.num_colors());
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
    let mut agree = 0;
    for _ in 0..200 {
        let w = Lasso::random(&mut rng, nba.alphabet.size(), 4, 4);
        if nba.accepts_lasso(&w) == dpa.accepts_lasso(&w) {
            agree += 1;
        }
    }
    println!("agreement on 200 random lassos: {agree}/200");
    print!("{}", dpa.to_hoa(&aps));
    Ok(())
}
