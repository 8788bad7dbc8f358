//! LTL to Büchi translation in the style of Gastin and Oddoux: a very weak
//! alternating automaton is unfolded into a transition-based generalized
//! Büchi automaton on the fly, then degeneralized with a counter.

use std::collections::{BTreeSet, HashMap};

use super::{Alphabet, Nba};
use crate::error::{Error, Result};
use crate::syntax::Ltl;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Node {
    True,
    False,
    Lit { bit: u32, positive: bool },
    And(u32, u32),
    Or(u32, u32),
    Next(u32),
    Until(u32, u32),
    Release(u32, u32),
}

type Term = Vec<u32>;

struct Arena {
    nodes: Vec<Node>,
    index: HashMap<Node, u32>,
    tr_cache: HashMap<(u32, u32), Vec<Term>>,
}

impl Arena {
    fn intern(&mut self, n: Node) -> u32 {
        if let Some(&id) = self.index.get(&n) {
            return id;
        }
        let id = self.nodes.len() as u32;
        self.nodes.push(n);
        self.index.insert(n, id);
        id
    }

    /// Negation normal form of an expanded formula.
    fn nnf(&mut self, f: &Ltl, neg: bool, bit_of: &dyn Fn(&str, &str) -> Result<u32>) -> Result<u32> {
        let node = match f {
            Ltl::True => {
                if neg {
                    Node::False
                } else {
                    Node::True
                }
            }
            Ltl::False => {
                if neg {
                    Node::True
                } else {
                    Node::False
                }
            }
            Ltl::Atom { prop, var } => Node::Lit { bit: bit_of(prop, var)?, positive: !neg },
            Ltl::Not(a) => return self.nnf(a, !neg, bit_of),
            Ltl::And(a, b) | Ltl::Or(a, b) => {
                let x = self.nnf(a, neg, bit_of)?;
                let y = self.nnf(b, neg, bit_of)?;
                match (matches!(f, Ltl::And(..)), neg) {
                    (true, false) | (false, true) => self.and(x, y),
                    _ => self.or(x, y),
                }
            }
            Ltl::Next(a) => Node::Next(self.nnf(a, neg, bit_of)?),
            Ltl::Until(a, b) => {
                let x = self.nnf(a, neg, bit_of)?;
                let y = self.nnf(b, neg, bit_of)?;
                if neg {
                    Node::Release(x, y)
                } else {
                    Node::Until(x, y)
                }
            }
            other => return self.nnf(&other.expand(), neg, bit_of),
        };
        Ok(self.intern(node))
    }

    fn and(&mut self, x: u32, y: u32) -> Node {
        match (self.nodes[x as usize], self.nodes[y as usize]) {
            (Node::False, _) | (_, Node::False) => Node::False,
            (Node::True, _) => self.nodes[y as usize],
            (_, Node::True) => self.nodes[x as usize],
            _ if x == y => self.nodes[x as usize],
            _ => Node::And(x.min(y), x.max(y)),
        }
    }

    fn or(&mut self, x: u32, y: u32) -> Node {
        match (self.nodes[x as usize], self.nodes[y as usize]) {
            (Node::True, _) | (_, Node::True) => Node::True,
            (Node::False, _) => self.nodes[y as usize],
            (_, Node::False) => self.nodes[x as usize],
            _ if x == y => self.nodes[x as usize],
            _ => Node::Or(x.min(y), x.max(y)),
        }
    }

    /// One-step unfolding as a disjunction of conjunctive next-state terms.
    fn tr(&mut self, id: u32, letter: u32) -> Vec<Term> {
        if let Some(t) = self.tr_cache.get(&(id, letter)) {
            return t.clone();
        }
        let out = match self.nodes[id as usize] {
            Node::True => vec![vec![]],
            Node::False => vec![],
            Node::Lit { bit, positive } => {
                if (letter >> bit & 1 == 1) == positive {
                    vec![vec![]]
                } else {
                    vec![]
                }
            }
            Node::And(a, b) => {
                let (ta, tb) = (self.tr(a, letter), self.tr(b, letter));
                product(&ta, &tb)
            }
            Node::Or(a, b) => {
                let mut t = self.tr(a, letter);
                t.extend(self.tr(b, letter));
                t
            }
            Node::Next(a) => match self.nodes[a as usize] {
                Node::True => vec![vec![]],
                Node::False => vec![],
                _ => vec![vec![a]],
            },
            Node::Until(a, b) => {
                let mut t = self.tr(b, letter);
                t.extend(self.tr(a, letter).into_iter().map(|mut x| {
                    insert(&mut x, id);
                    x
                }));
                t
            }
            Node::Release(a, b) => {
                let (ta, tb) = (self.tr(a, letter), self.tr(b, letter));
                let mut t = product(&ta, &tb);
                t.extend(tb.into_iter().map(|mut x| {
                    insert(&mut x, id);
                    x
                }));
                t
            }
        };
        let out = minimal(out);
        self.tr_cache.insert((id, letter), out.clone());
        out
    }
}

fn insert(term: &mut Term, id: u32) {
    if let Err(at) = term.binary_search(&id) {
        term.insert(at, id);
    }
}

fn union(a: &Term, b: &Term) -> Term {
    let set: BTreeSet<u32> = a.iter().chain(b.iter()).copied().collect();
    set.into_iter().collect()
}

fn product(a: &[Term], b: &[Term]) -> Vec<Term> {
    let mut out = Vec::new();
    for x in a {
        for y in b {
            out.push(union(x, y));
        }
    }
    minimal(out)
}

fn minimal(mut terms: Vec<Term>) -> Vec<Term> {
    terms.sort();
    terms.dedup();
    terms
}

/// Translates a quantifier-free matrix into an NBA over `(2^aps)^k`, where the
/// `j`-th component of a letter carries the propositions of `variables[j]`.
pub fn ltl_to_nba(matrix: &Ltl, variables: &[String], aps: &[String]) -> Result<Nba> {
    let alphabet = Alphabet::new(aps.len(), variables.len());
    let bit_of = |prop: &str, var: &str| -> Result<u32> {
        let j = variables.iter().position(|v| v == var).ok_or_else(|| Error::Unassigned(var.to_string()))?;
        let p = aps.iter().position(|a| a == prop).ok_or_else(|| Error::UnknownProposition(prop.to_string()))?;
        Ok((j * aps.len() + p) as u32)
    };
    let mut arena = Arena { nodes: vec![], index: HashMap::new(), tr_cache: HashMap::new() };
    let root = arena.nnf(matrix, false, &bit_of)?;
    let untils: Vec<u32> = (0..arena.nodes.len() as u32)
        .filter(|&i| matches!(arena.nodes[i as usize], Node::Until(..)))
        .collect();
    let m = untils.len();

    // states are (obligation set, counter); counter == m marks acceptance
    let init: Term = match arena.nodes[root as usize] {
        Node::True => vec![],
        _ => vec![root],
    };
    let mut index: HashMap<(Term, usize), u32> = HashMap::new();
    let mut states: Vec<(Term, usize)> = vec![];
    let mut edges: Vec<(u32, u32, u32)> = vec![];
    let start = (init, 0);
    index.insert(start.clone(), 0);
    states.push(start);
    let mut at = 0;
    while at < states.len() {
        let (set, counter) = states[at].clone();
        for letter in alphabet.letters() {
            let mut terms: Vec<Term> = vec![vec![]];
            for &f in &set {
                let t = arena.tr(f, letter);
                terms = product(&terms, &t);
                if terms.is_empty() {
                    break;
                }
            }
            for next in terms {
                let mut c = if counter == m { 0 } else { counter };
                while c < m && until_satisfied(&mut arena, untils[c], letter, &next) {
                    c += 1;
                }
                let key = (next, c);
                let id = match index.get(&key) {
                    Some(&id) => id,
                    None => {
                        let id = states.len() as u32;
                        index.insert(key.clone(), id);
                        states.push(key);
                        id
                    }
                };
                edges.push((at as u32, letter, id));
            }
        }
        at += 1;
    }
    let mut nba = Nba::new(alphabet, states.len());
    for (i, (_, c)) in states.iter().enumerate() {
        nba.accepting[i] = *c == m;
    }
    for (q, l, t) in edges {
        nba.add(q, l, t);
    }
    Ok(nba.reduce())
}

fn until_satisfied(arena: &mut Arena, u: u32, letter: u32, next: &Term) -> bool {
    if next.binary_search(&u).is_err() {
        return true;
    }
    arena
        .tr(u, letter)
        .iter()
        .any(|t| t.binary_search(&u).is_err() && t.iter().all(|x| next.binary_search(x).is_ok()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::Lasso;
    use crate::modelcheck::eval_matrix_zipped;
    use crate::syntax::parse_formula;
    use rand::SeedableRng;

    fn nba_for(src: &str) -> (Nba, Vec<String>, Ltl) {
        let f = parse_formula(src).unwrap();
        let vars = f.variables();
        let a = ltl_to_nba(&f.matrix, &vars, &["a".to_string()]).unwrap();
        (a, vars, f.matrix)
    }

    #[test]
    fn atomic_formula() {
        let (a, _, _) = nba_for("forall p. a[p]");
        assert!(a.len() <= 2);
        assert!(a.accepts_lasso(&Lasso::new(vec![1], vec![0])));
        assert!(!a.accepts_lasso(&Lasso::new(vec![0], vec![1])));
    }

    #[test]
    fn no_computable_witness_matrix() {
        let (a, _, _) = nba_for("forall p. exists q. (F a[p]) <-> (X a[q])");
        let al = a.alphabet;
        let w = |p: Lasso, q: Lasso| Lasso::zip(&al, &[p, q]);
        assert!(a.accepts_lasso(&w(Lasso::new(vec![0], vec![0]), Lasso::new(vec![0], vec![0]))));
        assert!(!a.accepts_lasso(&w(Lasso::new(vec![0], vec![1]), Lasso::new(vec![0], vec![0]))));
    }

    #[test]
    fn agrees_with_semantics_on_random_lassos() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for src in [
            "forall p, q. G (a[p] <-> a[q])",
            "forall p, q. (F a[p]) <-> (X a[q])",
            "forall p, q. a[p] U (a[q] && X !a[p])",
            "forall p, q. G F a[p] -> F G a[q]",
            "forall p, q. !(a[p] U a[q]) xor X X a[p]",
        ] {
            let (a, vars, m) = nba_for(src);
            for _ in 0..50 {
                let l = Lasso::random(&mut rng, a.alphabet.size(), 4, 4);
                let expect = eval_matrix_zipped(&m, &vars, &["a".to_string()], &l).unwrap();
                assert_eq!(a.accepts_lasso(&l), expect, "{src} on {l:?}");
            }
        }
    }

    #[test]
    fn size_diagnostic_bound() {
        let (a, _, m) = nba_for("forall p, q. G (a[p] <-> a[q])");
        let n = m.expand().size();
        assert!(a.len() <= n * (1 << n));
    }
}
