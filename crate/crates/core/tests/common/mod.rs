//! Independent oracles and fixtures shared by the integration tests.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashMap};

use hyperskolem::automata::{Alphabet, Dpa, Lasso, Nba};
use hyperskolem::equivalence::TypeSystem;
use hyperskolem::game::{DistributedGame, Position};
use hyperskolem::pipeline::{decide, Decision, Instance};
use hyperskolem::solver::SolveOptions;
use hyperskolem::syntax::parse_formula;
use hyperskolem::transducer::{DelayLedger, SkolemWitness, Transducer};
use hyperskolem::ts::TransitionSystem;
use rand::Rng;

pub const BUDGET: usize = 1_000_000;

pub const FREE_TS: &str = include_str!("../../data/free.ts");
pub const DELAYED: &str = include_str!("../../data/delayed.hltl");
pub const COPY: &str = include_str!("../../data/copy.hltl");
pub const LOOKAHEAD: &str = include_str!("../../data/lookahead.hltl");

pub fn free_ts() -> TransitionSystem {
    TransitionSystem::parse(FREE_TS).unwrap()
}

pub fn instance(ts: &TransitionSystem, src: &str) -> Instance {
    Instance::prepare(ts, &parse_formula(src).unwrap(), BUDGET).unwrap()
}

pub fn witness_for(ts: &TransitionSystem, src: &str) -> (Instance, SkolemWitness) {
    let inst = instance(ts, src);
    match decide(&inst, SolveOptions::default()).unwrap() {
        Decision::Yes { witness, .. } => (inst, witness),
        Decision::No => panic!("{src}: expected a witness"),
    }
}

pub fn random_nba<R: Rng>(rng: &mut R, alphabet: Alphabet, states: usize, density: f64) -> Nba {
    let mut a = Nba::new(alphabet, states);
    for q in 0..states as u32 {
        a.accepting[q as usize] = rng.gen_bool(0.4);
        for l in alphabet.letters() {
            for t in 0..states as u32 {
                if rng.gen_bool(density) {
                    a.add(q, l, t);
                }
            }
        }
    }
    a
}

pub fn random_dpa<R: Rng>(rng: &mut R, alphabet: Alphabet, states: usize, colors: u32) -> Dpa {
    let delta = (0..states * alphabet.size()).map(|_| rng.gen_range(0..states as u32)).collect();
    let color = (0..states).map(|_| rng.gen_range(0..colors)).collect();
    Dpa { alphabet, initial: 0, delta, color }
}

/// A system over one proposition with `n` vertices, every vertex having a successor.
pub fn random_ts<R: Rng>(rng: &mut R, n: usize) -> TransitionSystem {
    let mut text = String::from("aps: a\n");
    for v in 0..n {
        let label = if rng.gen_bool(0.5) { "{a}" } else { "{}" };
        text.push_str(&format!("vertex v{v} {label}{}\n", if v == 0 { " initial" } else { "" }));
    }
    for u in 0..n {
        let mut any = false;
        for v in 0..n {
            if rng.gen_bool(0.5) {
                text.push_str(&format!("edge v{u} v{v}\n"));
                any = true;
            }
        }
        if !any {
            text.push_str(&format!("edge v{u} v{}\n", rng.gen_range(0..n)));
        }
    }
    TransitionSystem::parse(&text).unwrap()
}

/// All words of length at most `max` over `letters` letters.
pub fn words(letters: u32, max: usize) -> Vec<Vec<u32>> {
    let mut out = vec![vec![]];
    let mut layer = vec![vec![]];
    for _ in 0..max {
        layer = layer
            .iter()
            .flat_map(|w: &Vec<u32>| {
                (0..letters).map(move |l| {
                    let mut x = w.clone();
                    x.push(l);
                    x
                })
            })
            .collect();
        out.extend(layer.iter().cloned());
    }
    out
}

/// All words of exactly length `len`.
pub fn words_of_len(letters: u32, len: usize) -> Vec<Vec<u32>> {
    words(letters, len).into_iter().filter(|w| w.len() == len).collect()
}

/// Relations behind the top-level equivalence, computed by enumerating every
/// run of the automaton and every path of the system one by one:
/// `(p, q, false)` for a run, `(p, q, true)` for an accepting run, and
/// `(j, u, v)` for a path of component `j`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct RunFacts {
    pub runs: BTreeSet<(u32, u32, bool)>,
    pub paths: BTreeSet<(usize, usize, usize)>,
}

pub fn run_facts(a: &Nba, ts: &TransitionSystem, word: &[u32]) -> RunFacts {
    fn runs_from(a: &Nba, word: &[u32], at: usize, q: u32, acc: bool, start: u32, out: &mut BTreeSet<(u32, u32, bool)>) {
        if at == word.len() {
            out.insert((start, q, false));
            if acc {
                out.insert((start, q, true));
            }
            return;
        }
        for &t in a.succ(q, word[at]) {
            runs_from(a, word, at + 1, t, acc || a.accepting[t as usize], start, out);
        }
    }
    fn paths_from(ts: &TransitionSystem, word: &[u32], at: usize, u: usize, start: usize, j: usize, out: &mut BTreeSet<(usize, usize, usize)>) {
        if at == word.len() {
            out.insert((j, start, u));
            return;
        }
        if ts.labels[u] != word[at] {
            return;
        }
        for &v in &ts.succ[u] {
            paths_from(ts, word, at + 1, v, start, j, out);
        }
    }
    let mut runs = BTreeSet::new();
    for p in 0..a.len() as u32 {
        runs_from(a, word, 0, p, false, p, &mut runs);
    }
    let mut paths = BTreeSet::new();
    for j in 0..a.alphabet.arity {
        let comp: Vec<u32> = word.iter().map(|&l| a.alphabet.component(l, j)).collect();
        for u in 0..ts.len() {
            paths_from(ts, &comp, 0, u, u, j, &mut paths);
        }
    }
    RunFacts { runs, paths }
}

/// Definitional level-`i` equivalence of two `i`-tuples of equal-length words,
/// zipped over `i` components of one proposition each, against an automaton
/// over `k` components.
pub struct Definitional<'a> {
    pub a: &'a Nba,
    pub ts: &'a TransitionSystem,
    pub k: usize,
    facts: HashMap<Vec<u32>, RunFacts>,
    memo: HashMap<(usize, Vec<u32>, Vec<u32>), bool>,
}

impl<'a> Definitional<'a> {
    pub fn new(a: &'a Nba, ts: &'a TransitionSystem, k: usize) -> Self {
        Definitional { a, ts, k, facts: HashMap::new(), memo: HashMap::new() }
    }

    fn facts(&mut self, w: &[u32]) -> RunFacts {
        if let Some(f) = self.facts.get(w) {
            return f.clone();
        }
        let f = run_facts(self.a, self.ts, w);
        self.facts.insert(w.to_vec(), f.clone());
        f
    }

    fn extend(w: &[u32], c: &[u32], i: usize) -> Vec<u32> {
        w.iter().zip(c).map(|(&x, &y)| x | y << i).collect()
    }

    pub fn equiv(&mut self, i: usize, w: &[u32], v: &[u32]) -> bool {
        if i == self.k {
            return self.facts(w) == self.facts(v);
        }
        let key = (i, w.to_vec(), v.to_vec());
        if let Some(&b) = self.memo.get(&key) {
            return b;
        }
        let cw = words_of_len(2, w.len());
        let cv = words_of_len(2, v.len());
        let mut ok = true;
        'fwd: for x in &cw {
            let wx = Self::extend(w, x, i);
            for y in &cv {
                if self.equiv(i + 1, &wx, &Self::extend(v, y, i)) {
                    continue 'fwd;
                }
            }
            ok = false;
            break;
        }
        if ok {
            'bwd: for y in &cv {
                let vy = Self::extend(v, y, i);
                for x in &cw {
                    if self.equiv(i + 1, &Self::extend(w, x, i), &vy) {
                        continue 'bwd;
                    }
                }
                ok = false;
                break;
            }
        }
        self.memo.insert(key, ok);
        ok
    }
}

/// Whether Player 1 has a positional strategy on the explicit two-block game
/// under which no reachable cycle has an odd largest color. Strategies are
/// enumerated move by move along the reachable part, cutting a branch as soon
/// as the decided part already contains an odd cycle.
pub fn positional_oracle(g: &DistributedGame) -> bool {
    let choice: Vec<bool> = g
        .positions
        .iter()
        .enumerate()
        .map(|(v, p)| matches!(p, Position::Play { i, .. } if i % 2 == 1) && g.edges[v].len() > 1)
        .collect();
    let mut sigma: Vec<Option<usize>> = vec![None; g.positions.len()];
    search(g, &choice, &mut sigma)
}

fn search(g: &DistributedGame, choice: &[bool], sigma: &mut Vec<Option<usize>>) -> bool {
    let n = g.positions.len();
    let succ = |v: usize, sigma: &[Option<usize>]| -> Vec<usize> {
        if choice[v] {
            sigma[v].map(|e| vec![g.edges[v][e].to]).unwrap_or_default()
        } else {
            g.edges[v].iter().map(|e| e.to).collect()
        }
    };
    let mut seen = vec![false; n];
    let mut stack = vec![0];
    seen[0] = true;
    let mut open = None;
    while let Some(v) = stack.pop() {
        if choice[v] && sigma[v].is_none() && open.is_none() {
            open = Some(v);
        }
        for t in succ(v, sigma) {
            if !seen[t] {
                seen[t] = true;
                stack.push(t);
            }
        }
    }
    let adj: Vec<Vec<usize>> = (0..n).map(|v| if seen[v] { succ(v, sigma) } else { vec![] }).collect();
    if odd_cycle(&adj, &g.color, &seen) {
        return false;
    }
    let Some(u) = open else { return true };
    for e in 0..g.edges[u].len() {
        sigma[u] = Some(e);
        if search(g, choice, sigma) {
            return true;
        }
    }
    sigma[u] = None;
    false
}

/// Whether some cycle within `alive` has an odd largest color: for each odd
/// color `c`, look for a cycle through a `c`-vertex using only colors `<= c`.
pub fn odd_cycle(adj: &[Vec<usize>], color: &[u32], alive: &[bool]) -> bool {
    let n = adj.len();
    let mut odd: Vec<u32> = color.iter().copied().filter(|c| c % 2 == 1).collect();
    odd.sort_unstable();
    odd.dedup();
    for c in odd {
        let ok: Vec<bool> = (0..n).map(|v| alive[v] && color[v] <= c).collect();
        for s in (0..n).filter(|&v| ok[v] && color[v] == c) {
            let mut seen = vec![false; n];
            let mut stack: Vec<usize> = adj[s].iter().copied().filter(|&t| ok[t]).collect();
            while let Some(v) = stack.pop() {
                if v == s {
                    return true;
                }
                if seen[v] {
                    continue;
                }
                seen[v] = true;
                stack.extend(adj[v].iter().copied().filter(|&t| ok[t]));
            }
        }
    }
    false
}

/// Random lasso that is a trace of the system: a random walk closed at the
/// first repeated (vertex, phase) pair.
pub fn random_trace<R: Rng>(rng: &mut R, ts: &TransitionSystem) -> Lasso {
    let phases = rng.gen_range(1..=4);
    let choices: Vec<Vec<usize>> = (0..ts.len()).map(|_| (0..phases).map(|_| rng.gen_range(0..8)).collect()).collect();
    let mut seen = BTreeMap::new();
    let mut letters = Vec::new();
    let mut v = ts.initial;
    let pre = rng.gen_range(0..4);
    for step in 0.. {
        let key = (v, if step < pre { usize::MAX - step } else { step % phases });
        if let Some(&start) = seen.get(&key) {
            let cycle = letters.split_off(start);
            return Lasso::new(letters, cycle);
        }
        seen.insert(key, letters.len());
        letters.push(ts.labels[v]);
        let succ = &ts.succ[v];
        v = succ[choices[v][step % phases] % succ.len()];
    }
    unreachable!()
}

/// Feeds `input` letter by letter and checks `i - bound <= |output| <= i` after each letter.
pub fn run_with_ledger(t: &Transducer, input: &Lasso, letters: usize, bound: usize) -> Vec<u32> {
    let mut s = t.start();
    let mut ledger = DelayLedger::default();
    let mut out = Vec::new();
    for i in 0..letters {
        let o = t.feed(&mut s, input.at(i)).unwrap();
        ledger.record(1, o.len(), bound).unwrap();
        out.extend(o);
    }
    assert!(ledger.max_lag <= t.delay);
    out
}

/// Block length by enumeration: with `N` level-1 classes, a class is infinite
/// exactly when it holds a word of length in `[N, 2N)`.
pub fn block_length_oracle(sys: &mut TypeSystem, letters: u32, classes: usize) -> usize {
    let mut by_type: HashMap<u32, Vec<usize>> = HashMap::new();
    for w in words(letters, 2 * classes - 1) {
        by_type.entry(sys.type_of(1, &w).unwrap()).or_default().push(w.len());
    }
    by_type
        .values()
        .filter(|lens| lens.iter().all(|&l| l < classes))
        .flat_map(|lens| lens.iter().map(|&l| l + 1))
        .max()
        .unwrap_or(1)
        .max(1)
}

/// Parity on the outcome, recomputed from the play: the sink loses, otherwise
/// the largest automaton color among the round-start positions of the cycle decides.
pub fn outcome_parity(dpa: &Dpa, cycle: &[Position]) -> bool {
    let mut best: Option<u32> = None;
    for v in cycle {
        match v {
            Position::Sink => return false,
            Position::Play { i, q, .. } if *i == 0 => best = Some(best.map_or(dpa.color[*q as usize], |b| b.max(dpa.color[*q as usize]))),
            _ => {}
        }
    }
    best.is_some_and(|c| c % 2 == 0)
}
