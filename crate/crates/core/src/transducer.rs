//! Bounded-delay transducers implementing Skolem functions.
//!
//! The transducer for existential block `p` reads the zipped traces of the
//! universal variables bound before it, block by block. From the blocks read
//! so far it reconstructs exactly what Player `p` observes at each game
//! position and feeds that to the player's strategy; when the strategy moves,
//! the chosen blocks are emitted. Universal blocks made up of a padding
//! variable are not read: they are fixed to a canonical trace of the system.

use std::collections::{HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::automata::{Alphabet, Dpa, Lasso};
use crate::error::{Error, Result};
use crate::game::{BlockId, Configuration, GameSchedule};
use crate::graph;
use crate::pipeline::{formula_digest, Instance};
use crate::solver::{MooreMachine, StrategyProfile};
use crate::ts::TransitionSystem;

pub const WITNESS_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transducer {
    /// Existential block whose variables this transducer outputs.
    pub block: usize,
    pub outputs: Vec<String>,
    /// Universal variables read, in input-letter component order.
    pub inputs: Vec<String>,
    /// Universal rows read from the input.
    pub input_rows: Vec<usize>,
    /// Universal rows fixed to a trace, with that trace.
    pub fixed_rows: Vec<(usize, Lasso)>,
    /// Whether the outputs are padding variables the sentence never mentions.
    pub padding: bool,
    pub schedule: GameSchedule,
    pub machine: MooreMachine,
    /// Maximal number of letters the output trails the input by.
    pub delay: usize,
}

/// Run state between input letters.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RunState {
    mem: usize,
    i: usize,
    r0: bool,
    /// Per observed row, blocks from the current round on.
    window: Vec<VecDeque<BlockId>>,
    /// Position in each fixed trace, normalized into the lasso.
    fixed_at: Vec<usize>,
    partial: Vec<u32>,
}

impl Transducer {
    fn observed_rows(&self) -> Vec<usize> {
        (0..self.block).step_by(2).collect()
    }

    pub fn input_alphabet(&self) -> Alphabet {
        Alphabet::new(self.schedule.props, self.inputs.len())
    }

    pub fn output_alphabet(&self) -> Alphabet {
        Alphabet::new(self.schedule.props, self.outputs.len())
    }

    pub fn start(&self) -> RunState {
        let rows = self.observed_rows().len();
        let mut s = RunState {
            mem: self.machine.initial,
            i: 0,
            r0: true,
            window: vec![VecDeque::new(); rows],
            fixed_at: vec![0; self.fixed_rows.len()],
            partial: vec![],
        };
        let mut out = Vec::new();
        self.advance(&mut s, &mut out);
        s
    }

    fn observation(&self, s: &RunState) -> Configuration {
        let sc = &self.schedule;
        let mut c = Configuration::empty(sc);
        for (w, j) in self.observed_rows().into_iter().enumerate() {
            let len = if j < s.i {
                sc.delta[j]
            } else if s.r0 {
                0
            } else {
                sc.delta[j] - 1
            };
            for x in 0..len {
                c.cells[sc.slot(j, x)] = Some(s.window[w][x]);
            }
        }
        c
    }

    /// Processes every game position whose observation is determined by
    /// the blocks read so far, appending emitted blocks to `out`.
    fn advance(&self, s: &mut RunState, out: &mut Vec<BlockId>) {
        let sc = &self.schedule;
        loop {
            let have = s.window.first().map_or(usize::MAX, VecDeque::len);
            let ready = if s.i == 0 { s.r0 || have + 1 >= sc.delta[0] } else { have >= sc.delta[0] };
            if !ready {
                return;
            }
            let obs = Some(self.observation(s));
            s.mem = self.machine.step(s.mem, &obs);
            if s.i == self.block {
                out.extend(self.machine.next_move(s.mem).iter().copied());
            }
            if s.i + 1 == sc.k {
                s.i = 0;
                for w in s.window.iter_mut() {
                    w.pop_front();
                }
                s.r0 = false;
            } else {
                s.i += 1;
            }
        }
    }

    fn fixed_block(&self, f: usize, s: &mut RunState) -> Result<BlockId> {
        let (row, lasso) = &self.fixed_rows[f];
        let mut letters = Vec::with_capacity(self.schedule.ell);
        for _ in 0..self.schedule.ell {
            letters.push(lasso.at(s.fixed_at[f]));
            s.fixed_at[f] += 1;
            if s.fixed_at[f] >= lasso.prefix.len() + lasso.cycle.len() {
                s.fixed_at[f] = lasso.prefix.len();
            }
        }
        self.schedule.block_of(*row, &letters)
    }

    /// Reads one block per input row and returns the emitted blocks.
    pub fn feed_blocks(&self, s: &mut RunState, blocks: &[BlockId]) -> Result<Vec<BlockId>> {
        if blocks.len() != self.input_rows.len() {
            return Err(Error::ArityMismatch { expected: self.input_rows.len(), found: blocks.len() });
        }
        for (w, j) in self.observed_rows().into_iter().enumerate() {
            let b = if let Some(x) = self.input_rows.iter().position(|&r| r == j) {
                blocks[x]
            } else {
                let f = self.fixed_rows.iter().position(|(r, _)| *r == j).ok_or_else(|| Error::Shape(format!("row {j} has no source")))?;
                self.fixed_block(f, s)?
            };
            s.window[w].push_back(b);
        }
        let mut out = Vec::new();
        self.advance(s, &mut out);
        Ok(out)
    }

    /// Splits a zipped input word of length `ℓ` into one block per input row.
    pub fn split_blocks(&self, letters: &[u32]) -> Result<Vec<BlockId>> {
        let al = self.input_alphabet();
        let mut comp = 0;
        let mut blocks = Vec::new();
        for &j in &self.input_rows {
            let arity = self.schedule.arities[j];
            let keep: Vec<usize> = (comp..comp + arity).collect();
            let row: Vec<u32> = letters.iter().map(|&l| al.project_letter(l, &keep)).collect();
            blocks.push(self.schedule.block_of(j, &row)?);
            comp += arity;
        }
        Ok(blocks)
    }

    /// Reads one input letter and returns the emitted output letters.
    pub fn feed(&self, s: &mut RunState, letter: u32) -> Result<Vec<u32>> {
        if letter as usize >= self.input_alphabet().size() {
            return Err(Error::InvalidLetter(format!("{letter} is not an input letter")));
        }
        s.partial.push(letter);
        if s.partial.len() < self.schedule.ell {
            return Ok(vec![]);
        }
        let letters = std::mem::take(&mut s.partial);
        let blocks = self.split_blocks(&letters)?;
        let out = self.feed_blocks(s, &blocks)?;
        Ok(out.iter().flat_map(|&b| self.schedule.block_letters(self.block, b)).collect())
    }

    /// Output on a lasso input, as a lasso, with the largest lag observed.
    pub fn run_lasso(&self, input: &Lasso) -> Result<(Lasso, usize)> {
        let mut s = self.start();
        let mut seen: HashMap<(RunState, usize), usize> = HashMap::new();
        let mut out: Vec<u32> = Vec::new();
        let mut lag = 0;
        let norm = |i: usize| if i < input.prefix.len() { i } else { input.prefix.len() + (i - input.prefix.len()) % input.cycle.len() };
        let mut i = 0;
        loop {
            let key = (s.clone(), norm(i));
            if i >= input.prefix.len() {
                if let Some(&o0) = seen.get(&key) {
                    if out.len() > o0 {
                        let cycle = out[o0..].to_vec();
                        out.truncate(o0);
                        return Ok((Lasso::new(out, cycle).normalized(), lag));
                    }
                }
                seen.insert(key, out.len());
            }
            out.extend(self.feed(&mut s, input.at(i))?);
            i += 1;
            assert!(out.len() <= i, "output ahead of input");
            lag = lag.max(i - out.len());
            assert!(lag <= self.delay, "output lags {lag} letters, declared {}", self.delay);
            if i > 1_000_000 {
                return Err(Error::budget("transducer run length", 1_000_000));
            }
        }
    }
}

/// Delay ledger of a running transducer.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DelayLedger {
    pub consumed: usize,
    pub emitted: usize,
    pub max_lag: usize,
}

impl DelayLedger {
    /// Records a step and checks `consumed - bound <= emitted <= consumed`.
    pub fn record(&mut self, read: usize, wrote: usize, bound: usize) -> Result<()> {
        self.consumed += read;
        self.emitted += wrote;
        if self.emitted > self.consumed || self.consumed - self.emitted > bound {
            return Err(Error::Internal(format!("delay bound {bound} violated: read {}, wrote {}", self.consumed, self.emitted)));
        }
        self.max_lag = self.max_lag.max(self.consumed - self.emitted);
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SkolemWitness {
    pub version: u32,
    pub schedule: GameSchedule,
    pub aps: Vec<String>,
    /// All trace variables in prefix order, padding included.
    pub variables: Vec<String>,
    /// The sentence, printed.
    pub formula: String,
    pub system_digest: String,
    pub formula_digest: String,
    pub transducers: Vec<Transducer>,
}

impl SkolemWitness {
    pub fn extract(inst: &Instance, profile: &StrategyProfile) -> Result<SkolemWitness> {
        let sc = &inst.schedule;
        let form = &inst.form;
        let canonical = inst.system.canonical_lasso();
        let mut transducers = Vec::new();
        for p in (1..sc.k).step_by(2) {
            let machine = profile.machine(p).ok_or_else(|| Error::Shape(format!("no strategy for block {p}")))?.clone();
            let mut input_rows = Vec::new();
            let mut fixed_rows = Vec::new();
            let mut inputs = Vec::new();
            for j in (0..p).step_by(2) {
                let vars = &form.blocks[j].vars;
                if vars.iter().all(|v| form.is_dummy(v)) {
                    fixed_rows.push((j, canonical.clone()));
                } else {
                    input_rows.push(j);
                    inputs.extend(vars.iter().cloned());
                }
            }
            let outputs = form.blocks[p].vars.clone();
            let padding = outputs.iter().all(|v| form.is_dummy(v));
            transducers.push(Transducer {
                block: p,
                outputs,
                inputs,
                input_rows,
                fixed_rows,
                padding,
                schedule: sc.clone(),
                machine,
                delay: sc.max_delay(),
            });
        }
        Ok(SkolemWitness {
            version: WITNESS_VERSION,
            schedule: sc.clone(),
            aps: inst.system.aps.clone(),
            variables: form.variables(),
            formula: inst.formula.to_string(),
            system_digest: inst.system.digest(),
            formula_digest: formula_digest(&inst.formula),
            transducers,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("witness serializes")
    }

    pub fn from_json(text: &str) -> Result<SkolemWitness> {
        let v: serde_json::Value = serde_json::from_str(text)?;
        let found = v.get("version").and_then(|x| x.as_u64()).ok_or_else(|| Error::Format("witness has no version".into()))? as u32;
        if found != WITNESS_VERSION {
            return Err(Error::Version { expected: WITNESS_VERSION, found });
        }
        let w: SkolemWitness = serde_json::from_value(v)?;
        let f = crate::syntax::parse_formula(&w.formula)?;
        if formula_digest(&f) != w.formula_digest {
            return Err(Error::Digest("formula does not match its digest".into()));
        }
        if w.transducers.iter().any(|t| t.schedule != w.schedule) {
            return Err(Error::Format("transducer schedule differs from the witness schedule".into()));
        }
        Ok(w)
    }

    /// Checks that the witness belongs to `ts`.
    pub fn check_system(&self, ts: &TransitionSystem) -> Result<()> {
        if ts.aps != self.aps {
            return Err(Error::Shape(format!("propositions {:?} differ from the witness's {:?}", ts.aps, self.aps)));
        }
        if ts.digest() != self.system_digest {
            return Err(Error::Digest("system does not match the witness".into()));
        }
        Ok(())
    }

    /// Universal variables read by some transducer, in prefix order.
    pub fn universal_inputs(&self) -> Vec<String> {
        let mut rows: Vec<usize> = self.transducers.iter().flat_map(|t| t.input_rows.clone()).collect();
        rows.sort();
        rows.dedup();
        let mut vars = Vec::new();
        for j in rows {
            let off: usize = self.schedule.arities[..j].iter().sum();
            vars.extend(self.variables[off..off + self.schedule.arities[j]].iter().cloned());
        }
        vars
    }

    /// Universal rows that are read from the user rather than fixed.
    pub fn input_rows(&self) -> Vec<usize> {
        let fixed: Vec<usize> = self.transducers.iter().flat_map(|t| t.fixed_rows.iter().map(|(r, _)| *r)).collect();
        (0..self.schedule.k).step_by(2).filter(|j| !fixed.contains(j)).collect()
    }
}

fn column(sc: &GameSchedule, blocks: &[BlockId]) -> Vec<u32> {
    let mut letters = vec![0u32; sc.ell];
    for (j, &b) in blocks.iter().enumerate() {
        let shift = sc.component_offset(j) * sc.props;
        for (t, l) in letters.iter_mut().enumerate() {
            *l |= sc.block_letter(j, b, t) << shift;
        }
    }
    letters
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct Product {
    runs: Vec<RunState>,
    pending: Vec<VecDeque<BlockId>>,
    fixed_at: Vec<usize>,
    q: u32,
    stepped: bool,
}

/// Plays the transducers against every choice of universal blocks and checks
/// that the winning-outcome automaton accepts every resulting tuple of traces.
pub fn verify_skolem(w: &SkolemWitness, dpa: &Dpa, ts: &TransitionSystem, budget: usize) -> Result<bool> {
    let sc = &w.schedule;
    if dpa.alphabet.arity != sc.components() || dpa.alphabet.props != sc.props || ts.aps != w.aps {
        return Err(Error::Shape("witness, automaton and system disagree on the alphabet".into()));
    }
    let (all, none) = dpa.verdicts();
    let canonical = ts.canonical_lasso();
    let rows = w.input_rows();
    let fixed: Vec<usize> = (0..sc.k).step_by(2).filter(|j| !rows.contains(j)).collect();
    let tick = |at: &mut usize| -> Vec<u32> {
        let mut letters = Vec::with_capacity(sc.ell);
        for _ in 0..sc.ell {
            letters.push(canonical.at(*at));
            *at += 1;
            if *at >= canonical.prefix.len() + canonical.cycle.len() {
                *at = canonical.prefix.len();
            }
        }
        letters
    };
    let init = Product {
        runs: w.transducers.iter().map(|t| t.start()).collect(),
        pending: vec![VecDeque::new(); sc.k],
        fixed_at: vec![0; fixed.len()],
        q: dpa.initial,
        stepped: false,
    };
    let choices: Vec<Vec<BlockId>> = {
        let mut out = vec![vec![]];
        for &j in &rows {
            out = out.into_iter().flat_map(|t| (0..sc.block_count(j) as BlockId).map(move |b| [t.clone(), vec![b]].concat())).collect();
        }
        out
    };
    let succ = |s: &Product| -> Result<Vec<Product>> {
        if all[s.q as usize] || none[s.q as usize] {
            return Ok(vec![s.clone()]);
        }
        let mut out = Vec::new();
        for choice in &choices {
            let mut t = s.clone();
            let mut row_block = vec![None; sc.k];
            for (x, &j) in rows.iter().enumerate() {
                row_block[j] = Some(choice[x]);
            }
            for (f, &j) in fixed.iter().enumerate() {
                row_block[j] = Some(sc.block_of(j, &tick(&mut t.fixed_at[f]))?);
            }
            for j in (0..sc.k).step_by(2) {
                t.pending[j].push_back(row_block[j].unwrap());
            }
            for (x, tr) in w.transducers.iter().enumerate() {
                let input: Vec<BlockId> = tr.input_rows.iter().map(|&j| row_block[j].unwrap()).collect();
                let emitted = tr.feed_blocks(&mut t.runs[x], &input)?;
                t.pending[tr.block].extend(emitted);
            }
            t.stepped = false;
            while t.pending.iter().all(|p| !p.is_empty()) {
                let col: Vec<BlockId> = t.pending.iter_mut().map(|p| p.pop_front().unwrap()).collect();
                t.q = dpa.run(t.q, &column(sc, &col));
                t.stepped = true;
            }
            out.push(t);
        }
        Ok(out)
    };
    let mut failure = None;
    let ex = graph::explore(
        vec![init],
        |s| {
            succ(s).unwrap_or_else(|e| {
                failure.get_or_insert(e);
                vec![s.clone()]
            })
        },
        budget,
        "witness product states",
    )?;
    if let Some(e) = failure {
        return Err(e);
    }
    if ex.states.iter().any(|s| none[s.q as usize]) {
        return Ok(false);
    }
    let color: Vec<u32> = ex.states.iter().map(|s| if all[s.q as usize] { 2 } else if s.stepped { dpa.color[s.q as usize] } else { 0 }).collect();
    Ok(!graph::has_odd_cycle(&ex.adj, &color, &vec![true; ex.states.len()]))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ledger_bounds() {
        let mut l = DelayLedger::default();
        l.record(3, 0, 3).unwrap();
        assert!(l.record(1, 0, 3).is_err());
        let mut l = DelayLedger::default();
        assert!(l.record(1, 2, 3).is_err());
    }
}
