//! Explicit graph helpers: reachable exploration, strongly connected
//! components, and parity checks on cycles.

use std::collections::HashMap;
use std::hash::Hash;

use crate::error::{Error, Result};

/// Explicit graph built by [`explore`].
pub struct Explored<S> {
    pub states: Vec<S>,
    pub adj: Vec<Vec<usize>>,
}

/// Breadth-first exploration of the states reachable from `init`.
/// Fails with a budget error once more than `limit` states are found.
pub fn explore<S, F>(init: Vec<S>, mut succ: F, limit: usize, what: &str) -> Result<Explored<S>>
where
    S: Hash + Eq + Clone,
    F: FnMut(&S) -> Vec<S>,
{
    let mut index: HashMap<S, usize> = HashMap::new();
    let mut states = Vec::new();
    for s in init {
        if !index.contains_key(&s) {
            index.insert(s.clone(), states.len());
            states.push(s);
        }
    }
    let mut adj = Vec::new();
    let mut at = 0;
    while at < states.len() {
        let next = succ(&states[at]);
        let mut row = Vec::with_capacity(next.len());
        for t in next {
            let id = match index.get(&t) {
                Some(&id) => id,
                None => {
                    if states.len() >= limit {
                        return Err(Error::budget(what, limit));
                    }
                    index.insert(t.clone(), states.len());
                    states.push(t);
                    states.len() - 1
                }
            };
            row.push(id);
        }
        adj.push(row);
        at += 1;
    }
    Ok(Explored { states, adj })
}

/// Tarjan's algorithm, iterative. Returns the component of every node and
/// whether each component contains a cycle. Components come out in reverse
/// topological order (sinks first).
pub fn scc(adj: &[Vec<usize>], alive: &dyn Fn(usize) -> bool) -> (Vec<usize>, Vec<bool>) {
    let n = adj.len();
    const NONE: usize = usize::MAX;
    let mut index = vec![NONE; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut comp = vec![NONE; n];
    let mut cyclic = Vec::new();
    let mut counter = 0;
    let mut call: Vec<(usize, usize)> = Vec::new();
    for root in 0..n {
        if index[root] != NONE || !alive(root) {
            continue;
        }
        call.push((root, 0));
        index[root] = counter;
        low[root] = counter;
        counter += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(&mut (v, ref mut i)) = call.last_mut() {
            if *i < adj[v].len() {
                let w = adj[v][*i];
                *i += 1;
                if !alive(w) {
                    continue;
                }
                if index[w] == NONE {
                    index[w] = counter;
                    low[w] = counter;
                    counter += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                call.pop();
                if let Some(&(u, _)) = call.last() {
                    low[u] = low[u].min(low[v]);
                }
                if low[v] == index[v] {
                    let c = cyclic.len();
                    let mut size = 0;
                    let mut self_loop = false;
                    loop {
                        let w = stack.pop().expect("tarjan stack");
                        on_stack[w] = false;
                        comp[w] = c;
                        size += 1;
                        self_loop |= adj[w].contains(&w);
                        if w == v {
                            break;
                        }
                    }
                    cyclic.push(size > 1 || self_loop);
                }
            }
        }
    }
    (comp, cyclic)
}

/// Nodes reachable from `roots`.
pub fn reachable(adj: &[Vec<usize>], roots: &[usize]) -> Vec<bool> {
    let mut seen = vec![false; adj.len()];
    let mut stack: Vec<usize> = roots.to_vec();
    for &r in roots {
        seen[r] = true;
    }
    while let Some(v) = stack.pop() {
        for &w in &adj[v] {
            if !seen[w] {
                seen[w] = true;
                stack.push(w);
            }
        }
    }
    seen
}

/// Whether some cycle among `alive` nodes has an odd maximal color.
pub fn has_odd_cycle(adj: &[Vec<usize>], color: &[u32], alive: &[bool]) -> bool {
    let mut odd: Vec<u32> = (0..adj.len()).filter(|&v| alive[v] && color[v] % 2 == 1).map(|v| color[v]).collect();
    odd.sort_unstable();
    odd.dedup();
    for c in odd {
        let keep = |v: usize| alive[v] && color[v] <= c;
        let (comp, cyclic) = scc(adj, &keep);
        if (0..adj.len()).any(|v| keep(v) && color[v] == c && cyclic[comp[v]]) {
            return true;
        }
    }
    false
}

/// Whether some cycle among `alive` nodes passes through a node with `mark`.
pub fn has_marked_cycle(adj: &[Vec<usize>], mark: &[bool], alive: &[bool]) -> bool {
    let (comp, cyclic) = scc(adj, &|v| alive[v]);
    (0..adj.len()).any(|v| alive[v] && mark[v] && cyclic[comp[v]])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scc_finds_cycles() {
        let adj = vec![vec![1], vec![2], vec![1], vec![3]];
        let (comp, cyclic) = scc(&adj, &|_| true);
        assert_eq!(comp[1], comp[2]);
        assert_ne!(comp[0], comp[1]);
        assert!(cyclic[comp[1]]);
        assert!(!cyclic[comp[0]]);
        assert!(cyclic[comp[3]]);
    }

    #[test]
    fn odd_cycle_detection() {
        let adj = vec![vec![1], vec![0, 2], vec![2]];
        let alive = vec![true; 3];
        assert!(has_odd_cycle(&adj, &[1, 0, 2], &alive));
        assert!(!has_odd_cycle(&adj, &[1, 2, 2], &alive));
    }
}
