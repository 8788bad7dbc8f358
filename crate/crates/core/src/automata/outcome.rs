use std::collections::HashMap;

use serde::Serialize;

use super::{determinize, Dpa, Nba};
use crate::error::{Error, Result};
use crate::ts::{TransitionSystem, VSet};

/// The winning-outcome automaton with size diagnostics.
#[derive(Debug, Clone)]
pub struct OutcomeDpa {
    pub dpa: Dpa,
    pub stats: OutcomeStats,
}

#[derive(Debug, Clone, Serialize)]
pub struct OutcomeStats {
    pub product_states: usize,
    pub determinized_states: usize,
    pub states: usize,
    pub colors: usize,
}

/// Deterministic parity automaton accepting the tuple words in which some
/// component listed in `universal` is not a trace of `ts`, or which `a_psi_t`
/// accepts. Trace sets are closed, so leaving them is noticed on a finite
/// prefix and sends the monitor to an accepting sink.
pub fn winning_outcome_dpa(a_psi_t: &Nba, ts: &TransitionSystem, universal: &[usize], budget: usize) -> Result<OutcomeDpa> {
    let det = determinize(a_psi_t, budget)?;
    let al = det.alphabet;
    let l = al.size();
    let start: Option<(u32, Vec<VSet>)> = Some((det.initial, vec![ts.initial_set(); universal.len()]));
    let mut index: HashMap<Option<(u32, Vec<VSet>)>, u32> = HashMap::new();
    let mut states = vec![start.clone()];
    index.insert(start, 0);
    let mut delta = Vec::new();
    let mut at = 0;
    while at < states.len() {
        let cur = states[at].clone();
        for letter in 0..l as u32 {
            let next = cur.as_ref().and_then(|(q, sets)| {
                let mut out = Vec::with_capacity(sets.len());
                for (s, &j) in sets.iter().zip(universal) {
                    let t = ts.post(*s, al.component(letter, j));
                    if t == 0 {
                        return None;
                    }
                    out.push(t);
                }
                Some((det.next(*q, letter), out))
            });
            let id = match index.get(&next) {
                Some(&id) => id,
                None => {
                    if states.len() >= budget {
                        return Err(Error::budget("outcome automaton states", budget));
                    }
                    let id = states.len() as u32;
                    index.insert(next.clone(), id);
                    states.push(next);
                    id
                }
            };
            delta.push(id);
        }
        at += 1;
    }
    let color = states.iter().map(|s| s.as_ref().map_or(0, |(q, _)| det.color[*q as usize])).collect();
    let dpa = Dpa { alphabet: al, initial: 0, delta, color }.minimize();
    let stats = OutcomeStats {
        product_states: a_psi_t.len(),
        determinized_states: det.len(),
        states: dpa.len(),
        colors: dpa.num_colors(),
    };
    Ok(OutcomeDpa { dpa, stats })
}
