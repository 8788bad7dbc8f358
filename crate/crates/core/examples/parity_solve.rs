//! Solve a small hand-written parity game.

use hyperskolem::solver::{solve_parity, Arena};

fn main() {
    // 0 -> 1 -> 0 is odd, 0 -> 2 -> 2 is even; player 0 owns 0.
    let mut a = Arena::default();
    let v0 = a.add(0, 1);
    let v1 = a.add(1, 3);
    let v2 = a.add(1, 2);
    a.succ[v0] = vec![v1, v2];
    a.succ[v1] = vec![v0];
    a.succ[v2] = vec![v2];
    let sol = solve_parity(&a);
    for v in 0..a.len() {
        println!("vertex {v}: won by player {}, move {:?}", sol.winner[v], sol.strategy[v]);
    }
}
