use std::collections::HashMap;

use super::{Alphabet, Lasso};
use crate::error::{Error, Result};
use crate::graph;

/// Nondeterministic Büchi automaton with state-based acceptance and an
/// explicit transition table indexed by `state * |Σ| + letter`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Nba {
    pub alphabet: Alphabet,
    pub initial: u32,
    pub accepting: Vec<bool>,
    pub delta: Vec<Vec<u32>>,
}

impl Nba {
    pub fn new(alphabet: Alphabet, states: usize) -> Self {
        Nba {
            alphabet,
            initial: 0,
            accepting: vec![false; states],
            delta: vec![Vec::new(); states * alphabet.size()],
        }
    }

    /// One-state automaton accepting every word.
    pub fn universal(alphabet: Alphabet) -> Self {
        let mut a = Nba::new(alphabet, 1);
        a.accepting[0] = true;
        for l in alphabet.letters() {
            a.add(0, l, 0);
        }
        a
    }

    pub fn len(&self) -> usize {
        self.accepting.len()
    }

    pub fn is_empty_automaton(&self) -> bool {
        self.accepting.is_empty()
    }

    pub fn succ(&self, q: u32, letter: u32) -> &[u32] {
        &self.delta[q as usize * self.alphabet.size() + letter as usize]
    }

    pub fn add(&mut self, q: u32, letter: u32, to: u32) {
        let row = &mut self.delta[q as usize * self.alphabet.size() + letter as usize];
        if let Err(at) = row.binary_search(&to) {
            row.insert(at, to);
        }
    }

    pub fn transitions(&self) -> usize {
        self.delta.iter().map(Vec::len).sum()
    }

    /// Letter-forgetting successor graph.
    pub fn graph(&self) -> Vec<Vec<usize>> {
        let l = self.alphabet.size();
        (0..self.len())
            .map(|q| {
                let mut v: Vec<usize> = (0..l).flat_map(|a| self.delta[q * l + a].iter().map(|&t| t as usize)).collect();
                v.sort_unstable();
                v.dedup();
                v
            })
            .collect()
    }

    pub fn is_empty(&self) -> bool {
        let adj = self.graph();
        let alive = graph::reachable(&adj, &[self.initial as usize]);
        !graph::has_marked_cycle(&adj, &self.accepting, &alive)
    }

    pub fn accepts_lasso(&self, w: &Lasso) -> bool {
        let len = w.prefix.len() + w.cycle.len();
        let next_pos = |p: usize| if p + 1 < len { p + 1 } else { w.prefix.len() };
        let n = self.len();
        let node = |q: usize, p: usize| q * len + p;
        let mut adj = vec![Vec::new(); n * len];
        let mut mark = vec![false; n * len];
        for q in 0..n {
            for p in 0..len {
                let letter = if p < w.prefix.len() { w.prefix[p] } else { w.cycle[p - w.prefix.len()] };
                adj[node(q, p)] = self.succ(q as u32, letter).iter().map(|&t| node(t as usize, next_pos(p))).collect();
                mark[node(q, p)] = self.accepting[q];
            }
        }
        let alive = graph::reachable(&adj, &[node(self.initial as usize, 0)]);
        graph::has_marked_cycle(&adj, &mark, &alive)
    }

    /// States from which some word is accepted.
    pub fn productive(&self) -> Vec<bool> {
        let adj = self.graph();
        let all = vec![true; self.len()];
        let (comp, cyclic) = graph::scc(&adj, &|v| all[v]);
        let mut good = vec![false; self.len()];
        for q in 0..self.len() {
            if self.accepting[q] && cyclic[comp[q]] {
                good[q] = true;
            }
        }
        let mut changed = true;
        while changed {
            changed = false;
            for q in 0..self.len() {
                if !good[q] && adj[q].iter().any(|&t| good[t]) {
                    good[q] = true;
                    changed = true;
                }
            }
        }
        good
    }

    /// Drops unreachable and unproductive states; the initial state survives.
    pub fn trim(&self) -> Nba {
        let good = self.productive();
        let adj = self.graph();
        let reach = graph::reachable(&adj, &[self.initial as usize]);
        let keep: Vec<bool> = (0..self.len()).map(|q| q == self.initial as usize || (good[q] && reach[q])).collect();
        self.restrict(&keep)
    }

    fn restrict(&self, keep: &[bool]) -> Nba {
        let mut map = vec![u32::MAX; self.len()];
        let mut order = vec![self.initial as usize];
        order.extend((0..self.len()).filter(|&q| keep[q] && q != self.initial as usize));
        for (i, &q) in order.iter().enumerate() {
            map[q] = i as u32;
        }
        let mut out = Nba::new(self.alphabet, order.len());
        for (i, &q) in order.iter().enumerate() {
            out.accepting[i] = self.accepting[q];
            for l in self.alphabet.letters() {
                for &t in self.succ(q as u32, l) {
                    if keep[t as usize] && map[t as usize] != u32::MAX {
                        out.add(i as u32, l, map[t as usize]);
                    }
                }
            }
        }
        out
    }

    /// Quotient by the coarsest bisimulation respecting acceptance.
    pub fn quotient(&self) -> Nba {
        let n = self.len();
        let l = self.alphabet.size();
        let mut class: Vec<u32> = self.accepting.iter().map(|&a| a as u32).collect();
        let mut count = class.iter().collect::<std::collections::HashSet<_>>().len();
        loop {
            let mut sig_index: HashMap<(u32, Vec<Vec<u32>>), u32> = HashMap::new();
            let mut next = vec![0u32; n];
            for q in 0..n {
                let sig: Vec<Vec<u32>> = (0..l)
                    .map(|a| {
                        let mut v: Vec<u32> = self.delta[q * l + a].iter().map(|&t| class[t as usize]).collect();
                        v.sort_unstable();
                        v.dedup();
                        v
                    })
                    .collect();
                let fresh = sig_index.len() as u32;
                next[q] = *sig_index.entry((class[q], sig)).or_insert(fresh);
            }
            let new_count = sig_index.len();
            class = next;
            if new_count == count {
                break;
            }
            count = new_count;
        }
        // renumber with the initial class first, others by first occurrence
        let mut map: HashMap<u32, u32> = HashMap::new();
        map.insert(class[self.initial as usize], 0);
        for q in 0..n {
            let fresh = map.len() as u32;
            map.entry(class[q]).or_insert(fresh);
        }
        let mut out = Nba::new(self.alphabet, map.len());
        for q in 0..n {
            let c = map[&class[q]];
            out.accepting[c as usize] = self.accepting[q];
            for a in 0..l {
                for &t in &self.delta[q * l + a] {
                    out.add(c, a as u32, map[&class[t as usize]]);
                }
            }
        }
        out
    }

    /// Trim followed by bisimulation quotient.
    pub fn reduce(&self) -> Nba {
        self.trim().quotient().trim()
    }

    pub fn intersect(&self, other: &Nba) -> Result<Nba> {
        if self.alphabet != other.alphabet {
            return Err(Error::ArityMismatch { expected: self.alphabet.arity, found: other.alphabet.arity });
        }
        let (n1, n2) = (self.len(), other.len());
        let id = |a: usize, b: usize, f: usize| ((a * n2 + b) * 2 + f) as u32;
        let mut out = Nba::new(self.alphabet, n1 * n2 * 2);
        out.initial = id(self.initial as usize, other.initial as usize, 0);
        for a in 0..n1 {
            for b in 0..n2 {
                for f in 0..2 {
                    let nf = match f {
                        0 if self.accepting[a] => 1,
                        1 if other.accepting[b] => 0,
                        _ => f,
                    };
                    out.accepting[id(a, b, f) as usize] = f == 1 && other.accepting[b];
                    for l in self.alphabet.letters() {
                        for &ta in self.succ(a as u32, l) {
                            for &tb in other.succ(b as u32, l) {
                                out.add(id(a, b, f), l, id(ta as usize, tb as usize, nf));
                            }
                        }
                    }
                }
            }
        }
        Ok(out.reduce())
    }

    /// Existential projection onto the components in `keep`.
    pub fn project(&self, keep: &[usize]) -> Result<Nba> {
        if keep.iter().any(|&j| j >= self.alphabet.arity) {
            return Err(Error::ArityMismatch { expected: self.alphabet.arity, found: keep.len() });
        }
        let target = Alphabet::new(self.alphabet.props, keep.len());
        let mut out = Nba::new(target, self.len());
        out.initial = self.initial;
        out.accepting = self.accepting.clone();
        for q in 0..self.len() as u32 {
            for l in self.alphabet.letters() {
                let pl = self.alphabet.project_letter(l, keep);
                for &t in self.succ(q, l) {
                    out.add(q, pl, t);
                }
            }
        }
        Ok(out.reduce())
    }

    /// Reads words over a wider alphabet, of which component `j` is taken
    /// from component `from[j]` of the wider letter.
    pub fn cylinder(&self, wide: Alphabet, from: &[usize]) -> Nba {
        assert_eq!(from.len(), self.alphabet.arity);
        let mut out = Nba::new(wide, self.len());
        out.initial = self.initial;
        out.accepting = self.accepting.clone();
        for q in 0..self.len() as u32 {
            for l in wide.letters() {
                let nl = wide.project_letter(l, from);
                for &t in self.succ(q, nl) {
                    out.add(q, l, t);
                }
            }
        }
        out
    }

    /// Some accepted lasso, if the language is nonempty.
    pub fn find_lasso(&self) -> Option<Lasso> {
        let adj = self.graph();
        let alive = graph::reachable(&adj, &[self.initial as usize]);
        let (comp, cyclic) = graph::scc(&adj, &|v| alive[v]);
        let target = (0..self.len()).find(|&q| alive[q] && self.accepting[q] && cyclic[comp[q]])?;
        let prefix = self.word_path(self.initial as usize, target, &|_| true, false)?;
        let cycle = self.word_path(target, target, &|q| comp[q] == comp[target], true)?;
        Some(Lasso::new(prefix, cycle))
    }

    fn word_path(&self, from: usize, to: usize, allowed: &dyn Fn(usize) -> bool, nonempty: bool) -> Option<Vec<u32>> {
        if from == to && !nonempty {
            return Some(vec![]);
        }
        let mut pred: HashMap<usize, (usize, u32)> = HashMap::new();
        let mut queue = std::collections::VecDeque::from([from]);
        while let Some(q) = queue.pop_front() {
            for l in self.alphabet.letters() {
                for &t in self.succ(q as u32, l) {
                    let t = t as usize;
                    if !allowed(t) || pred.contains_key(&t) {
                        continue;
                    }
                    pred.insert(t, (q, l));
                    if t == to {
                        let mut word = vec![];
                        let mut cur = to;
                        loop {
                            let (p, l) = pred[&cur];
                            word.push(l);
                            if p == from {
                                break;
                            }
                            cur = p;
                        }
                        word.reverse();
                        return Some(word);
                    }
                    queue.push_back(t);
                }
            }
        }
        None
    }
}
