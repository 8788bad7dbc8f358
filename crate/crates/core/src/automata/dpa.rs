use std::collections::HashMap;

use super::{Alphabet, Lasso, Nba};
use crate::graph;

/// Deterministic parity automaton, max-even acceptance on state colors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dpa {
    pub alphabet: Alphabet,
    pub initial: u32,
    pub delta: Vec<u32>,
    pub color: Vec<u32>,
}

impl Dpa {
    pub fn len(&self) -> usize {
        self.color.len()
    }

    pub fn is_empty_automaton(&self) -> bool {
        self.color.is_empty()
    }

    pub fn next(&self, q: u32, letter: u32) -> u32 {
        self.delta[q as usize * self.alphabet.size() + letter as usize]
    }

    pub fn run(&self, from: u32, word: &[u32]) -> u32 {
        word.iter().fold(from, |q, &l| self.next(q, l))
    }

    pub fn max_color(&self) -> u32 {
        self.color.iter().copied().max().unwrap_or(0)
    }

    pub fn num_colors(&self) -> usize {
        let mut c = self.color.clone();
        c.sort_unstable();
        c.dedup();
        c.len()
    }

    pub fn accepts_lasso(&self, w: &Lasso) -> bool {
        let mut q = self.run(self.initial, &w.prefix);
        let mut seen: HashMap<u32, usize> = HashMap::new();
        let mut starts = Vec::new();
        while !seen.contains_key(&q) {
            seen.insert(q, starts.len());
            starts.push(q);
            q = self.run(q, &w.cycle);
        }
        let mut best = 0;
        for &s in &starts[seen[&q]..] {
            let mut p = s;
            for &l in &w.cycle {
                p = self.next(p, l);
                best = best.max(self.color[p as usize]);
            }
        }
        best % 2 == 0
    }

    pub fn complement(&self) -> Dpa {
        Dpa { color: self.color.iter().map(|c| c + 1).collect(), ..self.clone() }
    }

    pub fn graph(&self) -> Vec<Vec<usize>> {
        let l = self.alphabet.size();
        (0..self.len())
            .map(|q| {
                let mut v: Vec<usize> = self.delta[q * l..(q + 1) * l].iter().map(|&t| t as usize).collect();
                v.sort_unstable();
                v.dedup();
                v
            })
            .collect()
    }

    /// Whether some word is accepted from `from`.
    pub fn nonempty_from(&self, from: u32) -> bool {
        let adj = self.graph();
        let alive = graph::reachable(&adj, &[from as usize]);
        let mut evens: Vec<u32> = (0..self.len()).filter(|&q| alive[q] && self.color[q] % 2 == 0).map(|q| self.color[q]).collect();
        evens.sort_unstable();
        evens.dedup();
        evens.into_iter().any(|c| {
            let keep = |v: usize| alive[v] && self.color[v] <= c;
            let (comp, cyclic) = graph::scc(&adj, &keep);
            (0..self.len()).any(|v| keep(v) && self.color[v] == c && cyclic[comp[v]])
        })
    }

    /// Per state: whether every word is accepted from it, and whether none is.
    pub fn verdicts(&self) -> (Vec<bool>, Vec<bool>) {
        let adj = self.graph();
        let all = (0..self.len())
            .map(|q| !graph::has_odd_cycle(&adj, &self.color, &graph::reachable(&adj, &[q])))
            .collect();
        let none = (0..self.len()).map(|q| !self.nonempty_from(q as u32)).collect();
        (all, none)
    }

    pub fn is_empty(&self) -> bool {
        !self.nonempty_from(self.initial)
    }

    /// Büchi automaton guessing the even color that dominates the run.
    pub fn to_nba(&self) -> Nba {
        let n = self.len();
        let mut evens: Vec<u32> = self.color.iter().copied().filter(|c| c % 2 == 0).collect();
        evens.sort_unstable();
        evens.dedup();
        let layers = evens.len() + 1;
        let id = |q: usize, layer: usize| (layer * n + q) as u32;
        let mut out = Nba::new(self.alphabet, n * layers);
        out.initial = id(self.initial as usize, 0);
        for q in 0..n {
            for (i, &c) in evens.iter().enumerate() {
                out.accepting[id(q, i + 1) as usize] = self.color[q] == c;
            }
            for l in self.alphabet.letters() {
                let t = self.next(q as u32, l) as usize;
                out.add(id(q, 0), l, id(t, 0));
                for (i, &c) in evens.iter().enumerate() {
                    if self.color[t] <= c {
                        out.add(id(q, 0), l, id(t, i + 1));
                        if self.color[q] <= c {
                            out.add(id(q, i + 1), l, id(t, i + 1));
                        }
                    }
                }
            }
        }
        out.reduce()
    }

    /// Maps colors onto a gap-free range preserving order and parity.
    pub fn compress_colors(&self) -> Dpa {
        let mut distinct = self.color.clone();
        distinct.sort_unstable();
        distinct.dedup();
        let mut map = HashMap::new();
        let mut next = 0u32;
        for c in distinct {
            if next % 2 != c % 2 {
                next += 1;
            }
            map.insert(c, next);
        }
        Dpa { color: self.color.iter().map(|c| map[c]).collect(), ..self.clone() }
    }

    /// Reachable part quotiented by the coarsest color-respecting bisimulation.
    pub fn minimize(&self) -> Dpa {
        let l = self.alphabet.size();
        let reach = graph::reachable(&self.graph(), &[self.initial as usize]);
        let states: Vec<usize> = (0..self.len()).filter(|&q| reach[q]).collect();
        let mut class: HashMap<usize, u32> = states.iter().map(|&q| (q, self.color[q])).collect();
        let mut count = {
            let mut c: Vec<u32> = class.values().copied().collect();
            c.sort_unstable();
            c.dedup();
            c.len()
        };
        loop {
            let mut sig: HashMap<(u32, Vec<u32>), u32> = HashMap::new();
            let mut next = HashMap::new();
            for &q in &states {
                let row: Vec<u32> = (0..l).map(|a| class[&(self.delta[q * l + a] as usize)]).collect();
                let fresh = sig.len() as u32;
                next.insert(q, *sig.entry((class[&q], row)).or_insert(fresh));
            }
            class = next;
            if sig.len() == count {
                break;
            }
            count = sig.len();
        }
        let mut map: HashMap<u32, u32> = HashMap::new();
        map.insert(class[&(self.initial as usize)], 0);
        for &q in &states {
            let fresh = map.len() as u32;
            map.entry(class[&q]).or_insert(fresh);
        }
        let n = map.len();
        let mut out = Dpa { alphabet: self.alphabet, initial: 0, delta: vec![0; n * l], color: vec![0; n] };
        for &q in &states {
            let c = map[&class[&q]] as usize;
            out.color[c] = self.color[q];
            for a in 0..l {
                out.delta[c * l + a] = map[&class[&(self.delta[q * l + a] as usize)]];
            }
        }
        out.compress_colors()
    }
}
