//! Explicit ω-automata over tuple alphabets `(2^AP)^k`.
//!
//! A letter is a `u32` bitmask: component `j` of a tuple letter occupies bits
//! `j * props .. (j + 1) * props`, and within a component bit `p` stands for
//! the `p`-th atomic proposition.

mod dpa;
mod io;
mod ltl;
mod nba;
mod outcome;
mod product;
mod safra;

pub use dpa::Dpa;
pub use io::{AutomatonJson, HoaExport};
pub use ltl::ltl_to_nba;
pub use nba::Nba;
pub use outcome::{winning_outcome_dpa, OutcomeDpa};
pub use product::{product_with_ts, trace_automaton};
pub use safra::determinize;

use serde::{Deserialize, Serialize};

/// Tuple alphabet `(2^AP)^arity` with `props = |AP|`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Alphabet {
    pub props: usize,
    pub arity: usize,
}

impl Alphabet {
    pub fn new(props: usize, arity: usize) -> Self {
        assert!(props * arity <= 24, "alphabet too large to enumerate");
        Alphabet { props, arity }
    }

    pub fn size(&self) -> usize {
        1 << (self.props * self.arity)
    }

    pub fn letters(&self) -> impl Iterator<Item = u32> {
        0..self.size() as u32
    }

    pub fn component_mask(&self) -> u32 {
        (1u32 << self.props) - 1
    }

    pub fn component(&self, letter: u32, j: usize) -> u32 {
        (letter >> (j * self.props)) & self.component_mask()
    }

    pub fn zip(&self, parts: &[u32]) -> u32 {
        debug_assert_eq!(parts.len(), self.arity);
        parts.iter().enumerate().fold(0, |acc, (j, &p)| acc | p << (j * self.props))
    }

    pub fn split(&self, letter: u32) -> Vec<u32> {
        (0..self.arity).map(|j| self.component(letter, j)).collect()
    }

    /// Keeps the listed components, in the listed order.
    pub fn project_letter(&self, letter: u32, keep: &[usize]) -> u32 {
        keep.iter().enumerate().fold(0, |acc, (i, &j)| acc | self.component(letter, j) << (i * self.props))
    }
}

/// Ultimately periodic word `prefix · cycle^ω`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Lasso {
    pub prefix: Vec<u32>,
    pub cycle: Vec<u32>,
}

impl Lasso {
    pub fn new(prefix: Vec<u32>, cycle: Vec<u32>) -> Self {
        assert!(!cycle.is_empty(), "lasso cycle must be nonempty");
        Lasso { prefix, cycle }
    }

    pub fn at(&self, i: usize) -> u32 {
        if i < self.prefix.len() {
            self.prefix[i]
        } else {
            self.cycle[(i - self.prefix.len()) % self.cycle.len()]
        }
    }

    /// First `n` letters.
    pub fn take(&self, n: usize) -> Vec<u32> {
        (0..n).map(|i| self.at(i)).collect()
    }

    /// Letters from position `from` on, as a lasso.
    pub fn suffix(&self, from: usize) -> Lasso {
        if from <= self.prefix.len() {
            return Lasso::new(self.prefix[from..].to_vec(), self.cycle.clone());
        }
        let r = (from - self.prefix.len()) % self.cycle.len();
        let mut cycle = self.cycle[r..].to_vec();
        cycle.extend_from_slice(&self.cycle[..r]);
        Lasso::new(vec![], cycle)
    }

    /// Componentwise combination of lassos over `alphabet`.
    pub fn zip(alphabet: &Alphabet, parts: &[Lasso]) -> Lasso {
        let pre = parts.iter().map(|l| l.prefix.len()).max().unwrap_or(0);
        let per = parts.iter().map(|l| l.cycle.len()).fold(1, lcm);
        let at = |i: usize| alphabet.zip(&parts.iter().map(|l| l.at(i)).collect::<Vec<_>>());
        Lasso::new((0..pre).map(at).collect(), (pre..pre + per).map(at).collect())
    }

    /// Component `j` of a tuple lasso.
    pub fn component(&self, alphabet: &Alphabet, j: usize) -> Lasso {
        Lasso::new(
            self.prefix.iter().map(|&l| alphabet.component(l, j)).collect(),
            self.cycle.iter().map(|&l| alphabet.component(l, j)).collect(),
        )
    }

    /// Random lasso with prefix and cycle lengths in the given ranges.
    pub fn random<R: rand::Rng>(rng: &mut R, letters: usize, max_prefix: usize, max_cycle: usize) -> Lasso {
        let p = rng.gen_range(0..=max_prefix);
        let c = rng.gen_range(1..=max_cycle.max(1));
        Lasso::new(
            (0..p).map(|_| rng.gen_range(0..letters) as u32).collect(),
            (0..c).map(|_| rng.gen_range(0..letters) as u32).collect(),
        )
    }

    /// Canonical form: shortest cycle rotation-aligned, prefix absorbed into the cycle where possible.
    pub fn normalized(&self) -> Lasso {
        let mut cycle = self.cycle.clone();
        let n = cycle.len();
        for d in 1..=n {
            if n % d == 0 && (0..n).all(|i| cycle[i] == cycle[i % d]) {
                cycle.truncate(d);
                break;
            }
        }
        let mut prefix = self.prefix.clone();
        while let Some(&last) = prefix.last() {
            if last == *cycle.last().unwrap() {
                prefix.pop();
                cycle.rotate_right(1);
            } else {
                break;
            }
        }
        Lasso { prefix, cycle }
    }
}

pub(crate) fn lcm(a: usize, b: usize) -> usize {
    fn gcd(a: usize, b: usize) -> usize {
        if b == 0 {
            a
        } else {
            gcd(b, a % b)
        }
    }
    a / gcd(a, b) * b
}
