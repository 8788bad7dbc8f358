//! Finite-index equivalences on tuples of equal-length words and the block length.
//!
//! Level `k` compares tuples by their [`Profile`]: which pairs of automaton
//! states are connected by a run (and by a run through an accepting state),
//! plus the labeled reachability matrix of every component in the system.
//! Level `i < k` compares `i`-tuples by the set of level-`(i+1)` types of
//! their same-length completions. Both are monoid morphisms: the type of a
//! concatenation is the product of the types, and a set-valued type
//! multiplies elementwise. Types are interned per level, so equality is an
//! integer comparison.
//!
//! Runs credit the states they enter: a run `p = r0, r1, ..., rn = q` is
//! accepting when some `r_j` with `j >= 1` is accepting.

use std::collections::HashMap;
use std::hash::Hash;

use serde::Serialize;

use crate::automata::{Alphabet, Nba};
use crate::error::{Error, Result};
use crate::graph;
use crate::ts::{ReachMatrix, TransitionSystem};

pub const NONE: u8 = 0;
pub const RUN: u8 = 1;
pub const ACC: u8 = 2;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Profile {
    pub n: usize,
    /// Row-major `n × n` matrix over {NONE, RUN, ACC}.
    pub aut: Vec<u8>,
    /// One reachability matrix per word component.
    pub ts: Vec<ReachMatrix>,
}

impl Profile {
    pub fn identity(n: usize, vertices: usize, components: usize) -> Self {
        let mut aut = vec![NONE; n * n];
        for p in 0..n {
            aut[p * n + p] = RUN;
        }
        Profile { n, aut, ts: vec![ReachMatrix::identity(vertices); components] }
    }

    pub fn of_letter(a: &Nba, ts: &TransitionSystem, letter: u32) -> Self {
        let n = a.len();
        let mut aut = vec![NONE; n * n];
        for p in 0..n {
            for &q in a.succ(p as u32, letter) {
                aut[p * n + q as usize] = if a.accepting[q as usize] { ACC } else { RUN };
            }
        }
        let tsm = (0..a.alphabet.arity).map(|j| ts.letter_matrix(a.alphabet.component(letter, j))).collect();
        Profile { n, aut, ts: tsm }
    }

    pub fn get(&self, p: usize, q: usize) -> u8 {
        self.aut[p * self.n + q]
    }

    pub fn compose(&self, other: &Profile) -> Profile {
        let n = self.n;
        let mut aut = vec![NONE; n * n];
        for p in 0..n {
            for q in 0..n {
                let x = self.aut[p * n + q];
                if x == NONE {
                    continue;
                }
                for r in 0..n {
                    let y = other.aut[q * n + r];
                    if y != NONE {
                        let v = x.max(y);
                        if v > aut[p * n + r] {
                            aut[p * n + r] = v;
                        }
                    }
                }
            }
        }
        let ts = self.ts.iter().zip(&other.ts).map(|(a, b)| a.compose(b)).collect();
        Profile { n, aut, ts }
    }
}

struct Interner<T> {
    values: Vec<T>,
    index: HashMap<T, u32>,
}

impl<T: Clone + Eq + Hash> Interner<T> {
    fn new() -> Self {
        Interner { values: vec![], index: HashMap::new() }
    }

    fn intern(&mut self, v: T, budget: usize, what: &str) -> Result<u32> {
        if let Some(&id) = self.index.get(&v) {
            return Ok(id);
        }
        if self.values.len() >= budget {
            return Err(Error::budget(what, budget));
        }
        let id = self.values.len() as u32;
        self.index.insert(v.clone(), id);
        self.values.push(v);
        Ok(id)
    }
}

/// A type at some level: a profile at level `k`, otherwise a set of
/// interned level-`(i+1)` type ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TypeValue<'a> {
    Profile(&'a Profile),
    Set(&'a [u32]),
}

/// Interning tables and caches for all levels `1..=k` over one automaton.
pub struct TypeSystem<'a> {
    pub nba: &'a Nba,
    pub ts: &'a TransitionSystem,
    /// Number of word components in each block.
    pub arities: Vec<usize>,
    offsets: Vec<usize>,
    budget: usize,
    profiles: Interner<Profile>,
    sets: Vec<Interner<Vec<u32>>>,
    compose_cache: Vec<HashMap<(u32, u32), u32>>,
    letter_cache: Vec<HashMap<u32, u32>>,
}

impl<'a> TypeSystem<'a> {
    pub fn new(nba: &'a Nba, ts: &'a TransitionSystem, arities: &[usize], budget: usize) -> Result<Self> {
        let k = arities.len();
        let total: usize = arities.iter().sum();
        if total != nba.alphabet.arity {
            return Err(Error::ArityMismatch { expected: nba.alphabet.arity, found: total });
        }
        let mut offsets = vec![0];
        for a in arities {
            offsets.push(offsets.last().unwrap() + a);
        }
        Ok(TypeSystem {
            nba,
            ts,
            arities: arities.to_vec(),
            offsets,
            budget,
            profiles: Interner::new(),
            sets: (0..=k).map(|_| Interner::new()).collect(),
            compose_cache: vec![HashMap::new(); k + 1],
            letter_cache: vec![HashMap::new(); k + 1],
        })
    }

    pub fn k(&self) -> usize {
        self.arities.len()
    }

    /// Alphabet of `level`-tuples: the components of blocks `0..level`.
    pub fn alphabet(&self, level: usize) -> Alphabet {
        Alphabet::new(self.nba.alphabet.props, self.offsets[level])
    }

    pub fn value(&self, level: usize, id: u32) -> TypeValue<'_> {
        if level == self.k() {
            TypeValue::Profile(&self.profiles.values[id as usize])
        } else {
            TypeValue::Set(&self.sets[level].values[id as usize])
        }
    }

    /// Number of distinct types interned so far at `level`.
    pub fn interned(&self, level: usize) -> usize {
        if level == self.k() {
            self.profiles.values.len()
        } else {
            self.sets[level].values.len()
        }
    }

    pub fn identity(&mut self, level: usize) -> Result<u32> {
        if level == self.k() {
            let p = Profile::identity(self.nba.len(), self.ts.len(), self.nba.alphabet.arity);
            return self.profiles.intern(p, self.budget, "profiles");
        }
        let inner = self.identity(level + 1)?;
        self.sets[level].intern(vec![inner], self.budget, "types")
    }

    /// Type of a single letter of the `level`-tuple alphabet.
    pub fn letter(&mut self, level: usize, letter: u32) -> Result<u32> {
        if let Some(&id) = self.letter_cache[level].get(&letter) {
            return Ok(id);
        }
        let id = if level == self.k() {
            let p = Profile::of_letter(self.nba, self.ts, letter);
            self.profiles.intern(p, self.budget, "profiles")?
        } else {
            let shift = self.offsets[level] * self.nba.alphabet.props;
            let width = self.arities[level] * self.nba.alphabet.props;
            let mut set = Vec::with_capacity(1 << width);
            for b in 0..1u32 << width {
                set.push(self.letter(level + 1, letter | b << shift)?);
            }
            set.sort_unstable();
            set.dedup();
            self.sets[level].intern(set, self.budget, "types")?
        };
        self.letter_cache[level].insert(letter, id);
        Ok(id)
    }

    pub fn compose(&mut self, level: usize, a: u32, b: u32) -> Result<u32> {
        if let Some(&id) = self.compose_cache[level].get(&(a, b)) {
            return Ok(id);
        }
        let id = if level == self.k() {
            let p = self.profiles.values[a as usize].compose(&self.profiles.values[b as usize]);
            self.profiles.intern(p, self.budget, "profiles")?
        } else {
            let (sa, sb) = (self.sets[level].values[a as usize].clone(), self.sets[level].values[b as usize].clone());
            let mut set = Vec::with_capacity(sa.len() * sb.len());
            for &x in &sa {
                for &y in &sb {
                    set.push(self.compose(level + 1, x, y)?);
                }
            }
            set.sort_unstable();
            set.dedup();
            self.sets[level].intern(set, self.budget, "types")?
        };
        self.compose_cache[level].insert((a, b), id);
        Ok(id)
    }

    /// Type of a word over the `level`-tuple alphabet.
    pub fn type_of(&mut self, level: usize, word: &[u32]) -> Result<u32> {
        let mut t = self.identity(level)?;
        for &l in word {
            let x = self.letter(level, l)?;
            t = self.compose(level, t, x)?;
        }
        Ok(t)
    }

    /// Type of a tuple of equal-length words, one per component of blocks `0..level`.
    pub fn type_of_tuple(&mut self, level: usize, words: &[Vec<u32>]) -> Result<u32> {
        if words.len() != self.offsets[level] {
            return Err(Error::ArityMismatch { expected: self.offsets[level], found: words.len() });
        }
        let len = words.first().map_or(0, Vec::len);
        if words.iter().any(|w| w.len() != len) {
            return Err(Error::LengthMismatch("tuple components differ in length".into()));
        }
        let al = self.alphabet(level);
        let zipped: Vec<u32> = (0..len).map(|i| al.zip(&words.iter().map(|w| w[i]).collect::<Vec<_>>())).collect();
        self.type_of(level, &zipped)
    }

    /// Reachable types at `level` as a DFA over the `level`-tuple alphabet.
    pub fn type_dfa(&mut self, level: usize) -> Result<TypeDfa> {
        let al = self.alphabet(level);
        let init = self.identity(level)?;
        let mut index: HashMap<u32, u32> = HashMap::from([(init, 0)]);
        let mut states = vec![init];
        let mut delta = Vec::new();
        let mut at = 0;
        while at < states.len() {
            for l in al.letters() {
                let x = self.letter(level, l)?;
                let t = self.compose(level, states[at], x)?;
                let id = match index.get(&t) {
                    Some(&id) => id,
                    None => {
                        if states.len() >= self.budget {
                            return Err(Error::budget("type automaton states", self.budget));
                        }
                        let id = states.len() as u32;
                        index.insert(t, id);
                        states.push(t);
                        id
                    }
                };
                delta.push(id);
            }
            at += 1;
        }
        Ok(TypeDfa { level, alphabet: al, types: states, delta })
    }
}

/// DFA whose state reached by a word is the word's type.
#[derive(Debug, Clone)]
pub struct TypeDfa {
    pub level: usize,
    pub alphabet: Alphabet,
    /// Interned type of each state; state 0 is the empty word.
    pub types: Vec<u32>,
    pub delta: Vec<u32>,
}

impl TypeDfa {
    pub fn len(&self) -> usize {
        self.types.len()
    }

    pub fn is_empty(&self) -> bool {
        self.types.is_empty()
    }

    pub fn next(&self, s: u32, letter: u32) -> u32 {
        self.delta[s as usize * self.alphabet.size() + letter as usize]
    }

    pub fn run(&self, word: &[u32]) -> u32 {
        word.iter().fold(0, |s, &l| self.next(s, l))
    }

    fn graph(&self) -> Vec<Vec<usize>> {
        let l = self.alphabet.size();
        (0..self.len()).map(|s| self.delta[s * l..(s + 1) * l].iter().map(|&t| t as usize).collect()).collect()
    }

    /// Which states have finitely many words leading to them.
    pub fn finite_classes(&self) -> Vec<bool> {
        let adj = self.graph();
        let (comp, cyclic) = graph::scc(&adj, &|_| true);
        let roots: Vec<usize> = (0..self.len()).filter(|&s| cyclic[comp[s]]).collect();
        let infinite = graph::reachable(&adj, &roots);
        infinite.into_iter().map(|b| !b).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BlockLength {
    pub ell: usize,
    /// A longest word lying in a finite class, if any class is finite.
    pub witness: Option<Vec<u32>>,
}

/// Smallest `ℓ >= 1` such that every word of length at least `ℓ` lies in an infinite class.
pub fn block_length(dfa: &TypeDfa) -> BlockLength {
    let finite = dfa.finite_classes();
    // finite states form a prefix-closed DAG rooted at the initial state
    let n = dfa.len();
    let mut longest: Vec<Option<Vec<u32>>> = vec![None; n];
    if finite.first().copied().unwrap_or(false) {
        longest[0] = Some(vec![]);
    }
    let adj = dfa.graph();
    let mut indeg = vec![0usize; n];
    for s in 0..n {
        if finite[s] {
            for &t in &adj[s] {
                if finite[t] {
                    indeg[t] += 1;
                }
            }
        }
    }
    let mut queue: Vec<usize> = (0..n).filter(|&s| finite[s] && indeg[s] == 0).collect();
    while let Some(s) = queue.pop() {
        for l in dfa.alphabet.letters() {
            let t = dfa.next(s as u32, l) as usize;
            if !finite[t] {
                continue;
            }
            if let Some(w) = &longest[s] {
                if longest[t].as_ref().is_none_or(|x| x.len() < w.len() + 1) {
                    let mut nw = w.clone();
                    nw.push(l);
                    longest[t] = Some(nw);
                }
            }
            indeg[t] -= 1;
            if indeg[t] == 0 {
                queue.push(t);
            }
        }
    }
    let witness = longest.into_iter().flatten().max_by_key(|w| w.len());
    let ell = witness.as_ref().map_or(1, |w| w.len() + 1).max(1);
    BlockLength { ell, witness }
}

/// Diagnostics written by `--dump-equivalence`.
#[derive(Debug, Clone, Serialize)]
pub struct EquivalenceDump {
    pub automaton_states: usize,
    pub vertices: usize,
    pub k: usize,
    /// Index of the equivalence at each level `1..=k`.
    pub index: Vec<usize>,
    pub monoid_size: usize,
    /// `log2` of the bound `3^(n^2) * 2^(k * s^2)` on the level-`k` index.
    pub index_bound_log2: f64,
    pub ell: usize,
    pub witness: Option<Vec<Vec<String>>>,
    pub type_dfa_states: usize,
}

/// Computes every level's index, the level-1 type DFA and the block length.
pub fn analyze(nba: &Nba, ts: &TransitionSystem, arities: &[usize], budget: usize) -> Result<(EquivalenceDump, TypeDfa)> {
    let mut sys = TypeSystem::new(nba, ts, arities, budget)?;
    let k = arities.len();
    let mut index = Vec::with_capacity(k);
    let mut dfa1 = None;
    for level in 1..=k {
        let dfa = sys.type_dfa(level)?;
        index.push(dfa.len());
        if level == 1 {
            dfa1 = Some(dfa);
        }
    }
    let dfa1 = dfa1.expect("k >= 1");
    let bl = block_length(&dfa1);
    let n = nba.len() as f64;
    let s = ts.len() as f64;
    let comps = nba.alphabet.arity as f64;
    let al1 = dfa1.alphabet;
    let witness = bl.witness.as_ref().map(|w| {
        w.iter()
            .map(|&l| (0..al1.arity).flat_map(|j| ts.label_names(al1.component(l, j))).collect())
            .collect()
    });
    let dump = EquivalenceDump {
        automaton_states: nba.len(),
        vertices: ts.len(),
        k,
        monoid_size: *index.last().unwrap(),
        index,
        index_bound_log2: n * n * 3f64.log2() + comps * s * s,
        ell: bl.ell,
        witness,
        type_dfa_states: dfa1.len(),
    };
    Ok((dump, dfa1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::{ltl_to_nba, product_with_ts};
    use crate::syntax::parse_formula;

    const DELAYED: &str = "aps: a\nvertex v0 {} initial\nvertex v1 {a}\nedge v0 v0\nedge v0 v1\nedge v1 v0\nedge v1 v1\n";

    fn setup(src: &str) -> (Nba, TransitionSystem) {
        let ts = TransitionSystem::parse(DELAYED).unwrap();
        let f = parse_formula(src).unwrap();
        let a = product_with_ts(&ltl_to_nba(&f.matrix, &f.variables(), &ts.aps).unwrap(), &ts).unwrap();
        (a, ts)
    }

    #[test]
    fn letter_matrix_component() {
        let (a, ts) = setup("forall p. exists q. (F a[p]) <-> (X a[q])");
        let p = Profile::of_letter(&a, &ts, 0);
        assert_eq!(p.ts[0].rows, vec![0b11, 0]);
    }

    #[test]
    fn empty_word_is_identity() {
        let (a, ts) = setup("forall p. exists q. (F a[p]) <-> (X a[q])");
        let mut sys = TypeSystem::new(&a, &ts, &[1, 1], 10_000).unwrap();
        let id = sys.identity(2).unwrap();
        assert_eq!(sys.type_of(2, &[]).unwrap(), id);
        let x = sys.letter(2, 3).unwrap();
        assert_eq!(sys.compose(2, id, x).unwrap(), x);
    }

    #[test]
    fn morphism_on_splits() {
        let (a, ts) = setup("forall p. exists q. (F a[p]) <-> (X a[q])");
        let mut sys = TypeSystem::new(&a, &ts, &[1, 1], 100_000).unwrap();
        let words: Vec<Vec<u32>> = vec![vec![0, 1, 0], vec![1, 1], vec![0, 0, 0, 1]];
        for w in &words {
            for cut in 0..=w.len() {
                for level in 1..=2 {
                    let whole = sys.type_of(level, w).unwrap();
                    let l = sys.type_of(level, &w[..cut]).unwrap();
                    let r = sys.type_of(level, &w[cut..]).unwrap();
                    assert_eq!(sys.compose(level, l, r).unwrap(), whole);
                }
            }
        }
    }

    #[test]
    fn block_length_bounded_by_states() {
        let (a, ts) = setup("forall p. exists q. (F a[p]) <-> (X a[q])");
        let (dump, dfa) = analyze(&a, &ts, &[1, 1], 100_000).unwrap();
        assert!(dump.ell <= dfa.len());
        assert!(dump.ell >= 1);
    }

    /// Profile entry computed by direct search over (state, seen-accepting) pairs.
    fn oracle_entry(a: &Nba, word: &[u32], p: usize, q: usize) -> u8 {
        let mut cur = vec![(p as u32, false)];
        for &l in word {
            let mut next = Vec::new();
            for &(s, seen) in &cur {
                for &t in a.succ(s, l) {
                    next.push((t, seen || a.accepting[t as usize]));
                }
            }
            next.sort_unstable();
            next.dedup();
            cur = next;
        }
        let hits: Vec<bool> = cur.iter().filter(|x| x.0 as usize == q).map(|x| x.1).collect();
        if hits.iter().any(|&b| b) {
            ACC
        } else if hits.is_empty() {
            NONE
        } else {
            RUN
        }
    }

    #[test]
    fn profiles_match_direct_search() {
        use rand::{Rng, SeedableRng};
        let (a, ts) = setup("forall p. exists q. (F a[p]) <-> (X a[q])");
        let mut sys = TypeSystem::new(&a, &ts, &[1, 1], 100_000).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..60 {
            let len = rng.gen_range(0..6);
            let w: Vec<u32> = (0..len).map(|_| rng.gen_range(0..4)).collect();
            let id = sys.type_of(2, &w).unwrap();
            let TypeValue::Profile(pr) = sys.value(2, id) else { panic!() };
            for p in 0..a.len() {
                for q in 0..a.len() {
                    assert_eq!(pr.get(p, q), oracle_entry(&a, &w, p, q), "{w:?} {p} {q}");
                }
            }
            for j in 0..2 {
                let comp: Vec<u32> = w.iter().map(|&l| a.alphabet.component(l, j)).collect();
                assert_eq!(pr.ts[j], ts.reach_matrix(&comp));
            }
        }
    }

    /// Level-1 equivalence straight from the definition: same set of
    /// level-2 profiles over all same-length completions.
    #[test]
    fn level_one_matches_completion_sets() {
        let (a, ts) = setup("forall p. exists q. (F a[p]) <-> (X a[q])");
        let mut sys = TypeSystem::new(&a, &ts, &[1, 1], 100_000).unwrap();
        let words: Vec<Vec<u32>> = (0..4usize)
            .flat_map(|len| (0..1u32 << len).map(move |m| (0..len).map(|i| m >> i & 1).collect()))
            .collect();
        let completion_set = |w: &Vec<u32>, sys: &mut TypeSystem| {
            let mut set: Vec<Profile> = Vec::new();
            for m in 0..1u32 << w.len() {
                let full: Vec<u32> = w.iter().enumerate().map(|(i, &x)| x | (m >> i & 1) << 1).collect();
                let id = sys.type_of(2, &full).unwrap();
                let TypeValue::Profile(p) = sys.value(2, id) else { panic!() };
                if !set.contains(p) {
                    set.push(p.clone());
                }
            }
            set
        };
        let sets: Vec<Vec<Profile>> = words.iter().map(|w| completion_set(w, &mut sys)).collect();
        for (x, wx) in words.iter().enumerate() {
            for (y, wy) in words.iter().enumerate() {
                let same = sets[x].len() == sets[y].len() && sets[x].iter().all(|p| sets[y].contains(p));
                let tx = sys.type_of(1, wx).unwrap();
                let ty = sys.type_of(1, wy).unwrap();
                assert_eq!(tx == ty, same, "{wx:?} {wy:?}");
            }
        }
    }
}
