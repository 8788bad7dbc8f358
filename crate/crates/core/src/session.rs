//! Stepping a witness block by block against user-chosen universal traces.

use std::collections::{BTreeMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::automata::{Dpa, Lasso};
use crate::error::{Error, Result};
use crate::game::BlockId;
use crate::pipeline::outcome_automaton;
use crate::syntax::parse_formula;
use crate::transducer::{DelayLedger, RunState, SkolemWitness};
use crate::ts::{TransitionSystem, VSet};

/// A letter as the sorted names of the propositions that hold.
pub type NamedLetter = Vec<String>;
pub type NamedBlock = Vec<NamedLetter>;

pub fn letter_names(ts: &TransitionSystem, letter: u32) -> NamedLetter {
    let mut v = ts.label_names(letter);
    v.sort();
    v
}

pub fn letter_of_names(ts: &TransitionSystem, names: &[String]) -> Result<u32> {
    names.iter().try_fold(0u32, |acc, n| {
        ts.prop_index(n).map(|i| acc | 1 << i).ok_or_else(|| Error::InvalidLetter(format!("unknown proposition `{n}`")))
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DelayEntry {
    pub block: usize,
    pub outputs: Vec<String>,
    pub consumed: usize,
    pub emitted: usize,
    pub lag: usize,
    pub bound: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Monitor {
    /// Per universal input variable: whether its prefix is still a trace prefix of the system.
    pub in_system: BTreeMap<String, bool>,
    /// State of the winning-outcome automaton after the completed columns.
    pub state: u32,
    pub letters_checked: usize,
    /// Whether some continuation is still accepted.
    pub can_accept: bool,
    /// Whether every continuation is accepted.
    pub settled: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepResult {
    /// Newly emitted blocks per existential variable.
    pub outputs: BTreeMap<String, Vec<NamedBlock>>,
    pub delays: Vec<DelayEntry>,
    pub monitor: Monitor,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HistoryEntry {
    pub inputs: BTreeMap<String, NamedBlock>,
    pub outputs: BTreeMap<String, Vec<NamedBlock>>,
}

#[derive(Debug, Clone)]
pub struct ExplanationSession {
    pub witness: SkolemWitness,
    pub system: TransitionSystem,
    dpa: Dpa,
    verdicts: (Vec<bool>, Vec<bool>),
    runs: Vec<RunState>,
    ledgers: Vec<DelayLedger>,
    pending: Vec<VecDeque<BlockId>>,
    fixed_at: Vec<usize>,
    in_system: Vec<VSet>,
    q: u32,
    letters_checked: usize,
    pub history: Vec<HistoryEntry>,
}

impl ExplanationSession {
    pub fn open(witness: SkolemWitness, system: TransitionSystem, budget: usize) -> Result<Self> {
        witness.check_system(&system)?;
        let formula = parse_formula(&witness.formula)?;
        let dpa = outcome_automaton(&system, &formula, budget)?.dpa;
        let verdicts = dpa.verdicts();
        let runs = witness.transducers.iter().map(|t| t.start()).collect();
        let ledgers = vec![DelayLedger::default(); witness.transducers.len()];
        let k = witness.schedule.k;
        let inputs = witness.universal_inputs().len();
        let fixed = (0..k).step_by(2).filter(|j| !witness.input_rows().contains(j)).count();
        Ok(ExplanationSession {
            q: dpa.initial,
            dpa,
            verdicts,
            runs,
            ledgers,
            pending: vec![VecDeque::new(); k],
            fixed_at: vec![0; fixed],
            in_system: vec![system.initial_set(); inputs],
            letters_checked: 0,
            history: vec![],
            witness,
            system,
        })
    }

    pub fn inputs(&self) -> Vec<String> {
        self.witness.universal_inputs()
    }

    pub fn outputs(&self) -> Vec<String> {
        self.witness.transducers.iter().flat_map(|t| t.outputs.clone()).collect()
    }

    fn parse_blocks(&self, blocks: &[NamedBlock]) -> Result<Vec<Vec<u32>>> {
        let n = self.inputs().len();
        if blocks.len() != n {
            return Err(Error::ArityMismatch { expected: n, found: blocks.len() });
        }
        let ell = self.witness.schedule.ell;
        blocks
            .iter()
            .map(|b| {
                if b.len() != ell {
                    return Err(Error::LengthMismatch(format!("blocks have {ell} letters, got {}", b.len())));
                }
                b.iter().map(|l| letter_of_names(&self.system, l)).collect()
            })
            .collect()
    }

    /// Feeds one block per universal input variable.
    pub fn step(&mut self, blocks: &[NamedBlock]) -> Result<StepResult> {
        let letters = self.parse_blocks(blocks)?;
        let mut next = self.clone();
        let r = next.step_letters(&letters)?;
        let inputs = self.inputs().into_iter().zip(blocks.iter().cloned()).collect();
        next.history.push(HistoryEntry { inputs, outputs: r.outputs.clone() });
        *self = next;
        Ok(r)
    }

    fn step_letters(&mut self, letters: &[Vec<u32>]) -> Result<StepResult> {
        let sc = self.witness.schedule.clone();
        let canonical = self.system.canonical_lasso();
        let rows = self.witness.input_rows();
        let mut row_block: Vec<Option<BlockId>> = vec![None; sc.k];
        let mut var = 0;
        for &j in &rows {
            let arity = sc.arities[j];
            let zipped: Vec<u32> = (0..sc.ell)
                .map(|t| (0..arity).fold(0u32, |acc, c| acc | letters[var + c][t] << (c * sc.props)))
                .collect();
            row_block[j] = Some(sc.block_of(j, &zipped)?);
            var += arity;
        }
        for (s, l) in self.in_system.iter_mut().zip(letters) {
            for &x in l {
                *s = self.system.post(*s, x);
            }
        }
        let mut f = 0;
        for j in (0..sc.k).step_by(2) {
            if row_block[j].is_none() {
                let mut w = Vec::with_capacity(sc.ell);
                for _ in 0..sc.ell {
                    w.push(canonical.at(self.fixed_at[f]));
                    self.fixed_at[f] += 1;
                    if self.fixed_at[f] >= canonical.prefix.len() + canonical.cycle.len() {
                        self.fixed_at[f] = canonical.prefix.len();
                    }
                }
                row_block[j] = Some(sc.block_of(j, &w)?);
                f += 1;
            }
            self.pending[j].push_back(row_block[j].unwrap());
        }
        let mut outputs = BTreeMap::new();
        let mut delays = Vec::new();
        for (x, t) in self.witness.transducers.iter().enumerate() {
            let input: Vec<BlockId> = t.input_rows.iter().map(|&j| row_block[j].unwrap()).collect();
            let emitted = t.feed_blocks(&mut self.runs[x], &input)?;
            self.ledgers[x].record(sc.ell, emitted.len() * sc.ell, t.delay)?;
            let al = t.output_alphabet();
            for (c, name) in t.outputs.iter().enumerate() {
                let blocks: Vec<NamedBlock> = emitted
                    .iter()
                    .map(|&b| sc.block_letters(t.block, b).iter().map(|&l| letter_names(&self.system, al.component(l, c))).collect())
                    .collect();
                outputs.insert(name.clone(), blocks);
            }
            self.pending[t.block].extend(emitted);
            let l = &self.ledgers[x];
            delays.push(DelayEntry {
                block: t.block,
                outputs: t.outputs.clone(),
                consumed: l.consumed,
                emitted: l.emitted,
                lag: l.consumed - l.emitted,
                bound: t.delay,
            });
        }
        while self.pending.iter().all(|p| !p.is_empty()) {
            let mut col = vec![0u32; sc.ell];
            for j in 0..sc.k {
                let b = self.pending[j].pop_front().unwrap();
                for (t, l) in col.iter_mut().enumerate() {
                    *l |= sc.block_letter(j, b, t) << (sc.component_offset(j) * sc.props);
                }
            }
            self.q = self.dpa.run(self.q, &col);
            self.letters_checked += sc.ell;
        }
        Ok(StepResult { outputs, delays, monitor: self.monitor() })
    }

    pub fn monitor(&self) -> Monitor {
        let in_system = self.inputs().into_iter().zip(self.in_system.iter().map(|&s| s != 0)).collect();
        Monitor {
            in_system,
            state: self.q,
            letters_checked: self.letters_checked,
            can_accept: !self.verdicts.1[self.q as usize],
            settled: self.verdicts.0[self.q as usize],
        }
    }

    /// Up to `limit` blocks per universal input variable that keep it a trace
    /// prefix of the system; any blocks once it has left.
    pub fn suggest_universal(&self, limit: usize) -> BTreeMap<String, Vec<NamedBlock>> {
        let ell = self.witness.schedule.ell;
        let mut out = BTreeMap::new();
        for (name, &s) in self.inputs().iter().zip(&self.in_system) {
            let words = if s != 0 {
                self.system.continuations(s, ell, limit)
            } else {
                let n = 1u32 << self.system.num_props();
                (0..limit.min((n as usize).pow(ell as u32)))
                    .map(|mut i| {
                        (0..ell)
                            .map(|_| {
                                let l = (i % n as usize) as u32;
                                i /= n as usize;
                                l
                            })
                            .collect()
                    })
                    .collect()
            };
            let blocks = words.iter().map(|w| w.iter().map(|&l| letter_names(&self.system, l)).collect()).collect();
            out.insert(name.clone(), blocks);
        }
        out
    }
}

/// Output traces of every existential variable on lasso inputs, one per
/// universal input variable, plus the largest lag of each transducer.
pub fn simulate(w: &SkolemWitness, ts: &TransitionSystem, inputs: &BTreeMap<String, Lasso>) -> Result<(BTreeMap<String, Lasso>, Vec<usize>)> {
    let mut outs = BTreeMap::new();
    let mut lags = Vec::new();
    for t in &w.transducers {
        let mut parts = Vec::new();
        for v in &t.inputs {
            let l = inputs.get(v).ok_or_else(|| Error::Unassigned(v.clone()))?;
            if l.prefix.iter().chain(&l.cycle).any(|&x| x >> ts.num_props() != 0) {
                return Err(Error::InvalidLetter(format!("trace for `{v}` uses unknown propositions")));
            }
            parts.push(l.clone());
        }
        let zipped = Lasso::zip(&t.input_alphabet(), &parts);
        let (out, lag) = t.run_lasso(&zipped)?;
        let al = t.output_alphabet();
        for (c, name) in t.outputs.iter().enumerate() {
            outs.insert(name.clone(), out.component(&al, c).normalized());
        }
        lags.push(lag);
    }
    Ok((outs, lags))
}

/// Parses `prefix(cycle)` with letters written `{a,b}`, e.g. `{}({a}{})`.
pub fn parse_lasso(ts: &TransitionSystem, text: &str) -> Result<Lasso> {
    let text = text.trim();
    let open = text.find('(').ok_or_else(|| Error::Format(format!("`{text}`: the cycle goes in parentheses")))?;
    let inner = text[open + 1..].strip_suffix(')').ok_or_else(|| Error::Format(format!("`{text}`: missing closing parenthesis")))?;
    let word = |s: &str| -> Result<Vec<u32>> {
        let mut out = Vec::new();
        let mut rest = s.trim();
        while !rest.is_empty() {
            let body = rest.strip_prefix('{').ok_or_else(|| Error::Format(format!("`{s}`: letters look like {{a,b}}")))?;
            let end = body.find('}').ok_or_else(|| Error::Format(format!("`{s}`: unclosed letter")))?;
            let names: Vec<String> = body[..end].split(',').map(str::trim).filter(|n| !n.is_empty()).map(String::from).collect();
            out.push(letter_of_names(ts, &names)?);
            rest = body[end + 1..].trim_start();
        }
        Ok(out)
    };
    let cycle = word(inner)?;
    if cycle.is_empty() {
        return Err(Error::Format(format!("`{text}`: empty cycle")));
    }
    Ok(Lasso::new(word(&text[..open])?, cycle))
}

pub fn format_lasso(ts: &TransitionSystem, l: &Lasso) -> String {
    let w = |s: &[u32]| s.iter().map(|&x| format!("{{{}}}", letter_names(ts, x).join(","))).collect::<String>();
    format!("{}({})", w(&l.prefix), w(&l.cycle))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lasso_text_roundtrip() {
        let ts = TransitionSystem::parse("aps: a b\nvertex v {a} initial\nedge v v\n").unwrap();
        let l = parse_lasso(&ts, "{}{a,b}({b}{})").unwrap();
        assert_eq!(l, Lasso::new(vec![0, 3], vec![2, 0]));
        assert_eq!(format_lasso(&ts, &l), "{}{a,b}({b}{})");
        assert!(parse_lasso(&ts, "{c}({})").is_err());
        assert!(parse_lasso(&ts, "{a}").is_err());
    }
}
