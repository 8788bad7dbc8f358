//! Büchi to parity determinization with Safra trees whose node names record
//! relative age, in the compact style of Piterman.
//!
//! A step applies the transition to every label, spawns a youngest child
//! holding the accepting part of each label, keeps every state only in its
//! oldest branch, drops empty nodes, and collapses nodes whose children cover
//! them. The most important event is the one with the smallest name: a
//! collapse (good) or the removal of an existing node (bad). Names are then
//! compacted so they stay below the number of Büchi states.

use std::collections::HashMap;

use fixedbitset::FixedBitSet;

use super::{Dpa, Nba};
use crate::error::{Error, Result};

/// Pre-order list of `(name, depth, label)`.
type Tree = Vec<(u32, u32, FixedBitSet)>;

struct Work {
    name: u32,
    label: FixedBitSet,
    children: Vec<usize>,
    old: bool,
    alive: bool,
}

fn unpack(tree: &Tree) -> Vec<Work> {
    let mut nodes: Vec<Work> = Vec::with_capacity(tree.len());
    let mut path: Vec<usize> = Vec::new();
    for (name, depth, label) in tree {
        path.truncate(*depth as usize);
        let id = nodes.len();
        if let Some(&p) = path.last() {
            nodes[p].children.push(id);
        }
        nodes.push(Work { name: *name, label: label.clone(), children: vec![], old: true, alive: true });
        path.push(id);
    }
    nodes
}

fn pack(nodes: &[Work], v: usize, depth: u32, out: &mut Tree) {
    if !nodes[v].alive {
        return;
    }
    out.push((nodes[v].name, depth, nodes[v].label.clone()));
    for &c in &nodes[v].children {
        pack(nodes, c, depth + 1, out);
    }
}

fn preorder(nodes: &[Work], v: usize, out: &mut Vec<usize>) {
    out.push(v);
    for &c in &nodes[v].children {
        preorder(nodes, c, out);
    }
}

fn hmerge(nodes: &mut Vec<Work>, v: usize, blocked: &mut FixedBitSet) {
    nodes[v].label.difference_with(blocked);
    let mut local = blocked.clone();
    let children = nodes[v].children.clone();
    for c in children {
        let parent = nodes[v].label.clone();
        nodes[c].label.intersect_with(&parent);
        hmerge(nodes, c, &mut local);
        local.union_with(&nodes[c].label);
    }
    blocked.union_with(&nodes[v].label);
}

fn kill(nodes: &mut Vec<Work>, v: usize, removed: &mut Vec<u32>) {
    if nodes[v].alive && nodes[v].old {
        removed.push(nodes[v].name);
    }
    nodes[v].alive = false;
    for c in nodes[v].children.clone() {
        kill(nodes, c, removed);
    }
}

/// One Safra step; returns the successor tree and the min-parity event
/// `(name, good)` if any.
fn step(a: &Nba, tree: &Tree, letter: u32) -> (Tree, Option<(u32, bool)>) {
    if tree.is_empty() {
        return (vec![], None);
    }
    let n = a.len();
    let mut nodes = unpack(tree);
    let mut acc = FixedBitSet::with_capacity(n);
    for q in 0..n {
        acc.set(q, a.accepting[q]);
    }
    for w in nodes.iter_mut() {
        let mut next = FixedBitSet::with_capacity(n);
        for q in w.label.ones() {
            for &t in a.succ(q as u32, letter) {
                next.insert(t as usize);
            }
        }
        w.label = next;
    }
    let mut fresh = nodes.iter().map(|w| w.name).max().unwrap_or(0) + 1;
    let mut order = Vec::new();
    preorder(&nodes, 0, &mut order);
    for v in order {
        let mut f = nodes[v].label.clone();
        f.intersect_with(&acc);
        if f.count_ones(..) > 0 {
            let id = nodes.len();
            nodes.push(Work { name: fresh, label: f, children: vec![], old: false, alive: true });
            fresh += 1;
            nodes[v].children.push(id);
        }
    }
    let mut blocked = FixedBitSet::with_capacity(n);
    hmerge(&mut nodes, 0, &mut blocked);

    let mut removed = Vec::new();
    let mut green = Vec::new();
    let mut order = Vec::new();
    preorder(&nodes, 0, &mut order);
    for &v in &order {
        if nodes[v].alive && nodes[v].label.count_ones(..) == 0 {
            kill(&mut nodes, v, &mut removed);
        }
    }
    for &v in &order {
        if !nodes[v].alive {
            continue;
        }
        let live: Vec<usize> = nodes[v].children.iter().copied().filter(|&c| nodes[c].alive).collect();
        if live.is_empty() {
            continue;
        }
        let mut cover = FixedBitSet::with_capacity(n);
        for &c in &live {
            cover.union_with(&nodes[c].label);
        }
        if cover == nodes[v].label {
            for c in live {
                kill(&mut nodes, c, &mut removed);
            }
            if nodes[v].old {
                green.push(nodes[v].name);
            }
        }
    }
    let bad = removed.iter().copied().min();
    let good = green.iter().copied().min();
    let event = match (good, bad) {
        (Some(g), Some(b)) if g < b => Some((g, true)),
        (_, Some(b)) => Some((b, false)),
        (Some(g), None) => Some((g, true)),
        (None, None) => None,
    };
    // compact names preserving age order
    let mut names: Vec<u32> = nodes.iter().filter(|w| w.alive).map(|w| w.name).collect();
    names.sort_unstable();
    let rank: HashMap<u32, u32> = names.iter().enumerate().map(|(i, &nm)| (nm, i as u32 + 1)).collect();
    for w in nodes.iter_mut().filter(|w| w.alive) {
        w.name = rank[&w.name];
    }
    let mut out = Vec::new();
    pack(&nodes, 0, 0, &mut out);
    (out, event)
}

/// Determinizes `a` into a parity automaton with at most `budget` states.
pub fn determinize(a: &Nba, budget: usize) -> Result<Dpa> {
    let n = a.len() as u32;
    let l = a.alphabet.size();
    let mut root = FixedBitSet::with_capacity(a.len());
    root.insert(a.initial as usize);
    let init: Tree = vec![(1, 0, root)];
    let mut index: HashMap<Tree, u32> = HashMap::new();
    let mut trees: Vec<Tree> = vec![init.clone()];
    index.insert(init, 0);
    let mut delta: Vec<u32> = Vec::new();
    // color of a state = color of the event on the transition entering it;
    // states are split by incoming event so colors sit on states
    let mut keyed: HashMap<(u32, u32), u32> = HashMap::new();
    let mut states: Vec<(u32, u32)> = vec![(0, 0)];
    keyed.insert((0, 0), 0);
    let mut at = 0;
    while at < states.len() {
        let (t, _) = states[at];
        let tree = trees[t as usize].clone();
        for letter in 0..l as u32 {
            let (next, event) = step(a, &tree, letter);
            let min_color = match event {
                Some((name, true)) => 2 * name,
                Some((name, false)) => 2 * name - 1,
                None => 2 * n + 1,
            };
            let color = 2 * n + 2 - min_color;
            let tid = match index.get(&next) {
                Some(&id) => id,
                None => {
                    let id = trees.len() as u32;
                    index.insert(next.clone(), id);
                    trees.push(next);
                    id
                }
            };
            let key = (tid, color);
            let sid = match keyed.get(&key) {
                Some(&s) => s,
                None => {
                    if states.len() >= budget {
                        return Err(Error::budget("determinization states", budget));
                    }
                    let s = states.len() as u32;
                    keyed.insert(key, s);
                    states.push(key);
                    s
                }
            };
            delta.push(sid);
        }
        at += 1;
    }
    let color = states.iter().map(|&(_, c)| c).collect();
    let dpa = Dpa { alphabet: a.alphabet, initial: 0, delta, color };
    Ok(dpa.minimize())
}
