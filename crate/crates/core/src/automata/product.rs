//! Product of a tuple automaton with one copy of the transition system per component.
//!
//! A product state remembers the vertex of each component whose label was
//! just read. Reading letter `σ` moves every component to a successor vertex
//! labeled `σ_j`, so equivalent vertex tuples collapse under the bisimulation
//! quotient applied at the end.

use std::collections::HashMap;

use super::{Alphabet, Nba};
use crate::error::{Error, Result};
use crate::ts::TransitionSystem;

/// Accepts the zipped words whose components are all traces of `ts` and that `a` accepts.
pub fn product_with_ts(a: &Nba, ts: &TransitionSystem) -> Result<Nba> {
    let al = a.alphabet;
    if al.props != ts.num_props() {
        return Err(Error::ArityMismatch { expected: ts.num_props(), found: al.props });
    }
    let k = al.arity;
    // candidates[v][label] = successors of v labeled `label`
    let mut by_label: Vec<HashMap<u32, Vec<u8>>> = vec![HashMap::new(); ts.len()];
    for (v, row) in by_label.iter_mut().enumerate() {
        for &w in &ts.succ[v] {
            row.entry(ts.labels[w]).or_default().push(w as u8);
        }
    }
    let mut index: HashMap<(u32, Vec<u8>), u32> = HashMap::new();
    let mut states: Vec<(u32, Vec<u8>)> = vec![(u32::MAX, vec![])];
    let mut edges: Vec<(u32, u32, u32)> = vec![];
    let mut at = 0;
    while at < states.len() {
        let (q, verts) = states[at].clone();
        for letter in al.letters() {
            let parts = al.split(letter);
            let targets: Vec<Vec<u8>> = if q == u32::MAX {
                if parts.iter().all(|&p| p == ts.labels[ts.initial]) {
                    vec![vec![ts.initial as u8; k]]
                } else {
                    vec![]
                }
            } else {
                let choices: Vec<&[u8]> = (0..k)
                    .map(|j| by_label[verts[j] as usize].get(&parts[j]).map(Vec::as_slice).unwrap_or(&[]))
                    .collect();
                cartesian(&choices)
            };
            if targets.is_empty() {
                continue;
            }
            let from_q = if q == u32::MAX { a.initial } else { q };
            for &nq in a.succ(from_q, letter) {
                for t in &targets {
                    let key = (nq, t.clone());
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
        }
        at += 1;
    }
    let mut out = Nba::new(al, states.len());
    for (i, (q, _)) in states.iter().enumerate() {
        out.accepting[i] = *q != u32::MAX && a.accepting[*q as usize];
    }
    for (q, l, t) in edges {
        out.add(q, l, t);
    }
    Ok(out.reduce())
}

fn cartesian(choices: &[&[u8]]) -> Vec<Vec<u8>> {
    let mut out = vec![vec![]];
    for c in choices {
        let mut next = Vec::with_capacity(out.len() * c.len());
        for prefix in &out {
            for &v in c.iter() {
                let mut p = prefix.clone();
                p.push(v);
                next.push(p);
            }
        }
        out = next;
    }
    out
}

/// Zipped words of `arity` traces of `ts`.
pub fn trace_automaton(ts: &TransitionSystem, arity: usize) -> Nba {
    product_with_ts(&Nba::universal(Alphabet::new(ts.num_props(), arity)), ts).expect("matching alphabet")
}
