//! The turn-based distributed game played on blocks.
//!
//! Rows `j` of a configuration hold the blocks picked for alternation block
//! `j` that the parity automaton has not consumed yet. Even rows are filled by
//! Nature (the universal player), odd row `i` by Player `i`. After the last
//! subround the first column is fed to the automaton letter by letter and the
//! configuration shifts left.

use std::collections::HashMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::automata::Dpa;
use crate::error::{Error, Result};

pub type BlockId = u32;
/// Blocks picked in one move: `Δ_i` of them in round 0, one afterwards.
pub type Action = Vec<BlockId>;
/// What a player sees of a position; `None` is the sink.
pub type Observation = Option<Configuration>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GameSchedule {
    pub k: usize,
    pub delta: Vec<usize>,
    pub ell: usize,
    /// Number of trace variables in each alternation block.
    pub arities: Vec<usize>,
    pub props: usize,
}

impl GameSchedule {
    pub fn new(k: usize, ell: usize, arities: &[usize], props: usize) -> Result<Self> {
        if k < 2 || k % 2 == 1 {
            return Err(Error::Shape(format!("number of alternation blocks must be even and positive, got {k}")));
        }
        if ell == 0 {
            return Err(Error::Shape("block length must be positive".into()));
        }
        if arities.len() != k {
            return Err(Error::ArityMismatch { expected: k, found: arities.len() });
        }
        let mut delta = vec![0; k];
        for i in (0..k).rev() {
            delta[i] = if i % 2 == 1 { (k - (i - 1)) / 2 } else { delta[i + 1] + 1 };
        }
        Ok(GameSchedule { k, delta, ell, arities: arities.to_vec(), props })
    }

    /// Letters of the alphabet of row `j`.
    pub fn letters(&self, j: usize) -> usize {
        1 << (self.props * self.arities[j])
    }

    pub fn block_count(&self, j: usize) -> usize {
        self.letters(j).saturating_pow(self.ell as u32)
    }

    /// Letter `t` of block `b` in row `j`.
    pub fn block_letter(&self, j: usize, b: BlockId, t: usize) -> u32 {
        let l = self.letters(j) as u64;
        ((b as u64 / l.pow(t as u32)) % l) as u32
    }

    pub fn block_letters(&self, j: usize, b: BlockId) -> Vec<u32> {
        (0..self.ell).map(|t| self.block_letter(j, b, t)).collect()
    }

    pub fn block_of(&self, j: usize, letters: &[u32]) -> Result<BlockId> {
        if letters.len() != self.ell {
            return Err(Error::LengthMismatch(format!("block of length {} expected, got {}", self.ell, letters.len())));
        }
        let l = self.letters(j) as u64;
        let mut b = 0u64;
        for &x in letters.iter().rev() {
            if x as u64 >= l {
                return Err(Error::InvalidLetter(format!("letter {x} outside row {j}")));
            }
            b = b * l + x as u64;
        }
        Ok(b as BlockId)
    }

    /// First trace component of row `j`.
    pub fn component_offset(&self, j: usize) -> usize {
        self.arities[..j].iter().sum()
    }

    pub fn components(&self) -> usize {
        self.arities.iter().sum()
    }

    pub fn slot(&self, j: usize, x: usize) -> usize {
        self.delta[..j].iter().sum::<usize>() + x
    }

    pub fn slots(&self) -> usize {
        self.delta.iter().sum()
    }

    /// Worst lag, in letters, of any existential output behind its input:
    /// nothing is emitted before `Δ_0` blocks have been read.
    pub fn max_delay(&self) -> usize {
        self.delta[0] * self.ell - 1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ConfigKind {
    Initial(usize),
    Looping(usize),
    Full,
}

/// Partial map from slots `(j, x)`, `x < Δ_j`, to blocks.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Configuration {
    pub cells: Vec<Option<BlockId>>,
}

impl Configuration {
    pub fn empty(s: &GameSchedule) -> Self {
        Configuration { cells: vec![None; s.slots()] }
    }

    pub fn get(&self, s: &GameSchedule, j: usize, x: usize) -> Option<BlockId> {
        self.cells[s.slot(j, x)]
    }

    fn domain_of(s: &GameSchedule, f: impl Fn(usize, usize) -> bool) -> Vec<bool> {
        (0..s.k).flat_map(|j| (0..s.delta[j]).map(move |x| (j, x))).map(|(j, x)| f(j, x)).collect()
    }

    /// Kind of the configuration. Initial and looping `(k-1)`-configurations
    /// coincide; they are reported as initial.
    pub fn kind(&self, s: &GameSchedule) -> Option<ConfigKind> {
        let dom: Vec<bool> = self.cells.iter().map(Option::is_some).collect();
        if dom.iter().all(|&b| b) {
            return Some(ConfigKind::Full);
        }
        for i in 0..s.k {
            if dom == Self::domain_of(s, |j, _| j < i) {
                return Some(ConfigKind::Initial(i));
            }
            if dom == Self::domain_of(s, |j, x| j < i || x + 2 <= s.delta[j]) {
                return Some(ConfigKind::Looping(i));
            }
        }
        None
    }

    pub fn ext_initial(&self, s: &GameSchedule, i: usize, blocks: &[BlockId]) -> Result<Configuration> {
        if self.kind(s) != Some(ConfigKind::Initial(i)) {
            return Err(Error::Shape(format!("not an initial {i}-configuration")));
        }
        if blocks.len() != s.delta[i] {
            return Err(Error::Shape(format!("row {i} takes {} blocks in round 0, got {}", s.delta[i], blocks.len())));
        }
        let mut c = self.clone();
        for (x, &b) in blocks.iter().enumerate() {
            c.cells[s.slot(i, x)] = Some(b);
        }
        Ok(c)
    }

    pub fn ext_looping(&self, s: &GameSchedule, i: usize, b: BlockId) -> Result<Configuration> {
        let ok = match self.kind(s) {
            Some(ConfigKind::Looping(j)) => j == i,
            Some(ConfigKind::Initial(j)) => j == i && i == s.k - 1,
            _ => false,
        };
        if !ok {
            return Err(Error::Shape(format!("not a looping {i}-configuration")));
        }
        let mut c = self.clone();
        c.cells[s.slot(i, s.delta[i] - 1)] = Some(b);
        Ok(c)
    }

    pub fn shft(&self, s: &GameSchedule) -> Result<Configuration> {
        if self.kind(s) != Some(ConfigKind::Full) {
            return Err(Error::Shape("only full configurations shift".into()));
        }
        let mut c = Configuration::empty(s);
        for j in 0..s.k {
            for x in 0..s.delta[j] - 1 {
                c.cells[s.slot(j, x)] = self.get(s, j, x + 1);
            }
        }
        Ok(c)
    }

    /// The rows `j < player` with `j` even; what Player `player` observes.
    pub fn restrict(&self, s: &GameSchedule, player: usize) -> Configuration {
        let mut c = Configuration::empty(s);
        for j in (0..player.min(s.k)).step_by(2) {
            for x in 0..s.delta[j] {
                c.cells[s.slot(j, x)] = self.get(s, j, x);
            }
        }
        c
    }

    /// The first column as `ℓ` letters over all trace components.
    pub fn column(&self, s: &GameSchedule) -> Result<Vec<u32>> {
        let mut letters = vec![0u32; s.ell];
        for j in 0..s.k {
            let b = self.get(s, j, 0).ok_or_else(|| Error::Shape(format!("row {j} has no block to process")))?;
            let shift = s.component_offset(j) * s.props;
            for (t, l) in letters.iter_mut().enumerate() {
                *l |= s.block_letter(j, b, t) << shift;
            }
        }
        Ok(letters)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Position {
    Sink,
    Play { i: usize, config: Configuration, q: u32 },
}

impl Position {
    pub fn subround(&self) -> Option<usize> {
        match self {
            Position::Sink => None,
            Position::Play { i, .. } => Some(*i),
        }
    }
}

/// All tuples of `len` blocks below `count`, lexicographically.
pub fn block_tuples(count: usize, len: usize) -> Vec<Action> {
    let mut out = vec![vec![]];
    for _ in 0..len {
        out = out.into_iter().flat_map(|t| (0..count as BlockId).map(move |b| [t.clone(), vec![b]].concat())).collect();
    }
    out
}

/// Implicit game graph over a schedule and the winning-outcome automaton.
#[derive(Debug, Clone)]
pub struct Game<'a> {
    pub sched: GameSchedule,
    pub dpa: &'a Dpa,
}

impl<'a> Game<'a> {
    pub fn new(sched: GameSchedule, dpa: &'a Dpa) -> Result<Self> {
        if dpa.alphabet.arity != sched.components() || dpa.alphabet.props != sched.props {
            return Err(Error::ArityMismatch { expected: sched.components(), found: dpa.alphabet.arity });
        }
        Ok(Game { sched, dpa })
    }

    pub fn k(&self) -> usize {
        self.sched.k
    }

    pub fn players(&self) -> Vec<usize> {
        (1..self.k()).step_by(2).collect()
    }

    pub fn initial(&self) -> Position {
        Position::Play { i: 0, config: Configuration::empty(&self.sched), q: self.dpa.initial }
    }

    /// The player choosing the edge label; Nature positions belong to Player 1.
    pub fn owner(&self, v: &Position) -> usize {
        match v {
            Position::Play { i, .. } if i % 2 == 1 => *i,
            _ => 1,
        }
    }

    /// Whether the labels at `v` are irrelevant and Nature picks the successor.
    pub fn is_nature(&self, v: &Position) -> bool {
        !matches!(v, Position::Play { i, .. } if i % 2 == 1)
    }

    pub fn color(&self, v: &Position) -> u32 {
        match v {
            Position::Sink => 1,
            Position::Play { i: 0, q, .. } => self.dpa.color[*q as usize] + 2,
            Position::Play { .. } => 0,
        }
    }

    pub fn observation(&self, v: &Position, player: usize) -> Observation {
        match v {
            Position::Sink => None,
            Position::Play { config, .. } => Some(config.restrict(&self.sched, player)),
        }
    }

    /// Whether the move at `v` is the round-0 move taking `Δ_i` blocks.
    pub fn round_zero(&self, v: &Position) -> bool {
        match v {
            Position::Sink => false,
            Position::Play { i, config, .. } => config.kind(&self.sched) == Some(ConfigKind::Initial(*i)),
        }
    }

    /// Number of blocks a well-formed move at `v` consists of.
    pub fn move_len(&self, v: &Position) -> usize {
        match v {
            Position::Play { i, .. } if self.round_zero(v) => self.sched.delta[*i],
            _ => 1,
        }
    }

    /// Well-formed actions of the owner at a player position, in canonical order.
    pub fn actions(&self, v: &Position) -> Vec<Action> {
        match v {
            Position::Play { i, .. } if i % 2 == 1 => block_tuples(self.sched.block_count(*i), self.move_len(v)),
            _ => vec![vec![]],
        }
    }

    /// Every action of the owner, including the malformed ones leading to the sink.
    pub fn all_actions(&self, v: &Position) -> Vec<Action> {
        match v {
            Position::Play { i, .. } if i % 2 == 1 => {
                let n = self.sched.block_count(*i);
                let mut out = block_tuples(n, self.sched.delta[*i]);
                if self.sched.delta[*i] != 1 {
                    out.extend(block_tuples(n, 1));
                }
                out
            }
            _ => vec![vec![]],
        }
    }

    /// Nature's choices at an even position.
    pub fn nature_choices(&self, v: &Position) -> Vec<Action> {
        match v {
            Position::Play { i, .. } if i % 2 == 0 => block_tuples(self.sched.block_count(*i), self.move_len(v)),
            _ => vec![vec![]],
        }
    }

    /// Successor after `blocks` are picked at `v` (by Nature at even positions).
    pub fn step(&self, v: &Position, blocks: &[BlockId]) -> Result<Position> {
        let Position::Play { i, config, q } = v else { return Ok(Position::Sink) };
        let s = &self.sched;
        let (i, q) = (*i, *q);
        if blocks.len() != self.move_len(v) {
            return if i % 2 == 1 { Ok(Position::Sink) } else { Err(Error::Shape("Nature move of the wrong length".into())) };
        }
        let c = if self.round_zero(v) { config.ext_initial(s, i, blocks)? } else { config.ext_looping(s, i, blocks[0])? };
        if i + 1 < s.k {
            return Ok(Position::Play { i: i + 1, config: c, q });
        }
        let q = self.dpa.run(q, &c.column(s)?);
        Ok(Position::Play { i: 0, config: c.shft(s)?, q })
    }

    /// Successors of `v` under an action of its owner.
    pub fn successors(&self, v: &Position, action: &Action) -> Result<Vec<Position>> {
        if self.is_nature(v) {
            if matches!(v, Position::Sink) {
                return Ok(vec![Position::Sink]);
            }
            return self.nature_choices(v).iter().map(|b| self.step(v, b)).collect();
        }
        Ok(vec![self.step(v, action)?])
    }

    /// Positionwise parity: the largest color on the cycle of a lasso play is even.
    pub fn winning_positionwise(&self, cycle: &[Position]) -> bool {
        cycle.iter().map(|v| self.color(v)).max().unwrap_or(1) % 2 == 0
    }

    /// The winning condition as defined on plays: the automaton colors at the
    /// 0-positions satisfy the parity condition and the sink is never visited.
    pub fn winning_subsequence(&self, cycle: &[Position]) -> bool {
        let mut best = None;
        for v in cycle {
            match v {
                Position::Sink => return false,
                Position::Play { i: 0, q, .. } => best = best.max(Some(self.dpa.color[*q as usize])),
                _ => {}
            }
        }
        best.is_some_and(|c| c % 2 == 0)
    }

    /// Random ultimately periodic play: every row repeats a random periodic
    /// sequence of moves, so the play revisits a position eventually.
    pub fn sample_play<R: Rng>(&self, rng: &mut R, wrong_moves: bool) -> Result<(Vec<Position>, Vec<Position>)> {
        let k = self.k();
        let period = rng.gen_range(1..=3usize);
        let pre = rng.gen_range(0..=2usize);
        let mut plan: Vec<Vec<Action>> = vec![vec![]; k];
        for (j, row) in plan.iter_mut().enumerate() {
            let n = self.sched.block_count(j);
            for _ in 0..pre + period {
                row.push(vec![rng.gen_range(0..n) as BlockId]);
            }
        }
        let rogue = if wrong_moves && rng.gen_bool(0.3) { Some(rng.gen_range(0..4 * k)) } else { None };
        let mut v = self.initial();
        let mut seen: HashMap<(Position, usize), usize> = HashMap::new();
        let mut trace = Vec::new();
        let mut round = 0;
        loop {
            let phase = if round < pre { round } else { pre + (round - pre) % period };
            let key = (v.clone(), if round < pre { usize::MAX - round } else { phase });
            if let Some(&start) = seen.get(&key) {
                let cycle = trace[start..].to_vec();
                trace.truncate(start);
                return Ok((trace, cycle));
            }
            seen.insert(key, trace.len());
            trace.push(v.clone());
            let Position::Play { i, .. } = &v else {
                let cycle = vec![v.clone()];
                trace.pop();
                return Ok((trace, cycle));
            };
            let i = *i;
            let len = self.move_len(&v);
            let mut blocks: Action = (0..len).map(|x| plan[i][(phase + x) % plan[i].len()][0]).collect();
            if rogue == Some(trace.len()) && i % 2 == 1 {
                blocks = vec![0; if len == 1 { self.sched.delta[i] } else { 1 }];
            }
            v = self.step(&v, &blocks)?;
            if i == k - 1 {
                round += 1;
            }
        }
    }
}

/// Edge of the explicit game; `action: None` means every action of the owner.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub action: Option<Action>,
    pub to: usize,
}

/// The reachable part of the game, explicitly.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DistributedGame {
    pub schedule: GameSchedule,
    pub positions: Vec<Position>,
    pub owner: Vec<usize>,
    pub color: Vec<u32>,
    pub edges: Vec<Vec<Edge>>,
}

/// Builds the positions reachable from the initial one.
pub fn build_game(game: &Game, budget: usize) -> Result<DistributedGame> {
    let mut index: HashMap<Position, usize> = HashMap::new();
    let mut positions = vec![game.initial()];
    index.insert(game.initial(), 0);
    let mut edges: Vec<Vec<Edge>> = Vec::new();
    let mut intern = |p: Position, positions: &mut Vec<Position>| -> Result<usize> {
        if let Some(&id) = index.get(&p) {
            return Ok(id);
        }
        if positions.len() >= budget {
            return Err(Error::budget("game positions", budget));
        }
        index.insert(p.clone(), positions.len());
        positions.push(p);
        Ok(positions.len() - 1)
    };
    let mut at = 0;
    while at < positions.len() {
        let v = positions[at].clone();
        let mut out = Vec::new();
        if game.is_nature(&v) {
            for t in game.successors(&v, &vec![])? {
                out.push(Edge { action: None, to: intern(t, &mut positions)? });
            }
        } else {
            for a in game.all_actions(&v) {
                let t = game.step(&v, &a)?;
                out.push(Edge { action: Some(a), to: intern(t, &mut positions)? });
            }
        }
        edges.push(out);
        at += 1;
    }
    let owner = positions.iter().map(|v| game.owner(v)).collect();
    let color = positions.iter().map(|v| game.color(v)).collect();
    Ok(DistributedGame { schedule: game.sched.clone(), positions, owner, color, edges })
}

impl DistributedGame {
    pub fn observation(&self, v: usize, player: usize) -> Observation {
        match &self.positions[v] {
            Position::Sink => None,
            Position::Play { config, .. } => Some(config.restrict(&self.schedule, player)),
        }
    }

    /// Whether positions indistinguishable to a better-informed player are
    /// indistinguishable to every less informed one, for the order
    /// `k-1` (best informed), ..., 3, 1.
    pub fn is_hierarchical(&self) -> bool {
        let players: Vec<usize> = (1..self.schedule.k).step_by(2).rev().collect();
        for (a, &better) in players.iter().enumerate() {
            for &worse in &players[a + 1..] {
                let mut seen: HashMap<Observation, Observation> = HashMap::new();
                for v in 0..self.positions.len() {
                    let ob = self.observation(v, better);
                    let ow = self.observation(v, worse);
                    if let Some(prev) = seen.get(&ob) {
                        if *prev != ow {
                            return false;
                        }
                    } else {
                        seen.insert(ob, ow);
                    }
                }
            }
        }
        true
    }

    /// No dead ends, and at player positions every label is an action of the owner
    /// leading to exactly one successor.
    pub fn is_turn_based(&self) -> bool {
        self.edges.iter().enumerate().all(|(v, out)| {
            if out.is_empty() {
                return false;
            }
            let nature = out.iter().all(|e| e.action.is_none());
            let labelled = out.iter().all(|e| e.action.is_some());
            if nature {
                return true;
            }
            let mut acts: Vec<&Action> = out.iter().filter_map(|e| e.action.as_ref()).collect();
            let n = acts.len();
            acts.sort();
            acts.dedup();
            labelled && acts.len() == n && matches!(self.positions[v], Position::Play { .. })
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("game serializes")
    }
}
