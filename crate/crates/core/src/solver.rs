//! Solving the block game for the coalition of existential players.
//!
//! Player `k-1` sees every row Nature fills and knows its own and the
//! lower players' moves, so once those are fixed its problem is a game of
//! perfect information. For `k = 2` that is the whole story. For `k = 4`
//! Player 1 is tracked through knowledge sets (the positions compatible with
//! what it has observed); its strategies that depend only on the current
//! knowledge set are enumerated in a fixed order, each one inducing a parity
//! game for Player 3 that is solved exactly.
//!
//! Positions whose automaton state accepts every word (or none) are merged
//! into absorbing winning (losing) nodes.

use std::collections::{BTreeMap, HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{Action, Game, Observation, Position};
use crate::graph;

/// Perfect-information parity game; player 0 wins if the largest color seen
/// infinitely often is even.
#[derive(Debug, Clone, Default)]
pub struct Arena {
    pub owner: Vec<u8>,
    pub color: Vec<u32>,
    pub succ: Vec<Vec<usize>>,
}

impl Arena {
    pub fn len(&self) -> usize {
        self.owner.len()
    }

    pub fn is_empty(&self) -> bool {
        self.owner.is_empty()
    }

    pub fn add(&mut self, owner: u8, color: u32) -> usize {
        self.owner.push(owner);
        self.color.push(color);
        self.succ.push(vec![]);
        self.owner.len() - 1
    }
}

#[derive(Debug, Clone)]
pub struct ParitySolution {
    /// Winner of each node.
    pub winner: Vec<u8>,
    /// Successor for nodes owned by their winner.
    pub strategy: Vec<Option<usize>>,
}

fn attractor(a: &Arena, pred: &[Vec<usize>], alive: &[bool], target: &[bool], p: u8, strategy: &mut [Option<usize>]) -> Vec<bool> {
    let mut inside = target.to_vec();
    let mut count: Vec<usize> = (0..a.len()).map(|v| if alive[v] { a.succ[v].iter().filter(|&&w| alive[w]).count() } else { 0 }).collect();
    let mut queue: VecDeque<usize> = (0..a.len()).filter(|&v| target[v]).collect();
    while let Some(v) = queue.pop_front() {
        for &u in &pred[v] {
            if !alive[u] || inside[u] {
                continue;
            }
            if a.owner[u] == p {
                inside[u] = true;
                strategy[u] = Some(v);
                queue.push_back(u);
            } else {
                count[u] -= 1;
                if count[u] == 0 {
                    inside[u] = true;
                    queue.push_back(u);
                }
            }
        }
    }
    inside
}

fn zielonka(a: &Arena, pred: &[Vec<usize>], alive: &[bool], strategy: &mut [Option<usize>]) -> [Vec<bool>; 2] {
    let n = a.len();
    let Some(d) = (0..n).filter(|&v| alive[v]).map(|v| a.color[v]).max() else {
        return [vec![false; n], vec![false; n]];
    };
    let p = (d % 2) as u8;
    let top: Vec<bool> = (0..n).map(|v| alive[v] && a.color[v] == d).collect();
    let attr = attractor(a, pred, alive, &top, p, strategy);
    let rest: Vec<bool> = (0..n).map(|v| alive[v] && !attr[v]).collect();
    let sub = zielonka(a, pred, &rest, strategy);
    let q = 1 - p as usize;
    if !sub[q].iter().any(|&b| b) {
        for v in 0..n {
            if top[v] && a.owner[v] == p {
                strategy[v] = a.succ[v].iter().copied().find(|&w| alive[w]);
            }
        }
        let mut w = [vec![false; n], vec![false; n]];
        w[p as usize] = alive.to_vec();
        return w;
    }
    let b = attractor(a, pred, alive, &sub[q], 1 - p, strategy);
    let rest: Vec<bool> = (0..n).map(|v| alive[v] && !b[v]).collect();
    let mut w = zielonka(a, pred, &rest, strategy);
    for v in 0..n {
        if b[v] {
            w[q][v] = true;
        }
    }
    w
}

/// Zielonka's recursive algorithm. Ties are broken by node index.
pub fn solve_parity(a: &Arena) -> ParitySolution {
    let mut pred = vec![vec![]; a.len()];
    for (v, out) in a.succ.iter().enumerate() {
        for &w in out {
            pred[w].push(v);
        }
    }
    let a2 = a.clone();
    std::thread::scope(|s| {
        std::thread::Builder::new()
            .stack_size(256 << 20)
            .spawn_scoped(s, move || {
                let mut strategy = vec![None; a2.len()];
                let w = zielonka(&a2, &pred, &vec![true; a2.len()], &mut strategy);
                let winner: Vec<u8> = (0..a2.len()).map(|v| if w[0][v] { 0 } else { 1 }).collect();
                for v in 0..a2.len() {
                    if a2.owner[v] != winner[v] {
                        strategy[v] = None;
                    }
                }
                ParitySolution { winner, strategy }
            })
            .expect("solver thread")
            .join()
            .expect("solver thread panicked")
    })
}

/// Renders an observation as a table key.
pub fn obs_key(o: &Observation) -> String {
    match o {
        None => "sink".into(),
        Some(c) => c.cells.iter().map(|x| x.map_or("-".to_string(), |b| b.to_string())).collect::<Vec<_>>().join(","),
    }
}

/// Finite-memory strategy: memory is updated on every observation, and the
/// move at the owner's positions is read off the current memory state.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MooreMachine {
    pub player: usize,
    pub initial: usize,
    pub moves: Vec<Action>,
    pub update: Vec<BTreeMap<String, usize>>,
    /// Successor on observations missing from the table.
    pub fallback: Vec<usize>,
}

impl MooreMachine {
    pub fn len(&self) -> usize {
        self.moves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.moves.is_empty()
    }

    pub fn step(&self, m: usize, o: &Observation) -> usize {
        self.update[m].get(&obs_key(o)).copied().unwrap_or(self.fallback[m])
    }

    pub fn next_move(&self, m: usize) -> &Action {
        &self.moves[m]
    }

    /// Memory after reading the observations in order.
    pub fn run<'o>(&self, obs: impl IntoIterator<Item = &'o Observation>) -> usize {
        obs.into_iter().fold(self.initial, |m, o| self.step(m, o))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StrategyProfile {
    /// One machine per odd player, in increasing order.
    pub machines: Vec<MooreMachine>,
}

impl StrategyProfile {
    pub fn machine(&self, player: usize) -> Option<&MooreMachine> {
        self.machines.iter().find(|m| m.player == player)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("profile serializes")
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SolveOptions {
    /// Limit on nodes of any arena or knowledge structure built.
    pub budget: usize,
    /// Limit on Player-1 strategies tried when `k = 4`.
    pub attempts: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { budget: 2_000_000, attempts: 64 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum Member {
    Pos(Position),
    Won { i: usize, r0: bool },
    Lost { i: usize, r0: bool },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Mem {
    Start,
    Node(usize),
    Collapsed(usize, bool),
}

struct Groups {
    by: BTreeMap<Observation, usize>,
    rest: Option<usize>,
}

#[derive(Default)]
struct Assign {
    digits: Vec<usize>,
    order: Vec<usize>,
    at: HashMap<usize, usize>,
}

impl Assign {
    fn digit(&mut self, n: usize) -> usize {
        if let Some(&t) = self.at.get(&n) {
            return self.digits[t];
        }
        let t = self.order.len();
        self.order.push(n);
        self.at.insert(n, t);
        if self.digits.len() <= t {
            self.digits.push(0);
        }
        self.digits[t]
    }

    fn get(&self, n: usize) -> usize {
        self.at.get(&n).map_or(0, |&t| self.digits[t])
    }
}

struct Residual {
    nodes: Vec<(usize, Member)>,
    index: HashMap<(usize, Member), usize>,
    arena: Arena,
}

struct Solver<'g, 'a> {
    game: &'g Game<'a>,
    all: Vec<bool>,
    none: Vec<bool>,
    track: bool,
    knowledge: Vec<Vec<Member>>,
    kindex: HashMap<Vec<Member>, usize>,
    groups: HashMap<(usize, usize), Groups>,
    budget: usize,
}

fn member_phase(m: &Member, game: &Game) -> (usize, bool) {
    match m {
        Member::Pos(v) => (v.subround().unwrap_or(0), game.round_zero(v)),
        Member::Won { i, r0 } | Member::Lost { i, r0 } => (*i, *r0),
    }
}

fn advance(k: usize, i: usize, r0: bool) -> (usize, bool) {
    ((i + 1) % k, r0 && i + 1 < k)
}

impl<'g, 'a> Solver<'g, 'a> {
    fn new(game: &'g Game<'a>, budget: usize) -> Self {
        let (all, none) = game.dpa.verdicts();
        Solver { game, all, none, track: game.k() > 2, knowledge: vec![], kindex: HashMap::new(), groups: HashMap::new(), budget }
    }

    fn collapse(&self, v: Position) -> Member {
        if let Position::Play { i, q, .. } = &v {
            let r0 = self.game.round_zero(&v);
            if self.all[*q as usize] {
                return Member::Won { i: *i, r0 };
            }
            if self.none[*q as usize] {
                return Member::Lost { i: *i, r0 };
            }
        }
        Member::Pos(v)
    }

    fn intern(&mut self, members: Vec<Member>) -> Result<usize> {
        if let Some(&id) = self.kindex.get(&members) {
            return Ok(id);
        }
        if self.knowledge.len() >= self.budget {
            return Err(Error::budget("knowledge sets", self.budget));
        }
        self.kindex.insert(members.clone(), self.knowledge.len());
        self.knowledge.push(members);
        Ok(self.knowledge.len() - 1)
    }

    fn phase(&self, n: usize) -> (usize, bool) {
        member_phase(&self.knowledge[n][0], self.game)
    }

    fn has_pos(&self, n: usize) -> bool {
        self.knowledge[n].iter().any(|m| matches!(m, Member::Pos(_)))
    }

    fn choices(&self, n: usize) -> usize {
        self.knowledge[n]
            .iter()
            .find_map(|m| if let Member::Pos(v) = m { Some(self.game.actions(v).len()) } else { None })
            .unwrap_or(1)
    }

    /// Successors of a knowledge set grouped by what Player 1 observes next;
    /// `digit` fixes Player 1's move at its own sets.
    fn groups(&mut self, n: usize, digit: Option<usize>) -> Result<&Groups> {
        let key = (n, digit.unwrap_or(usize::MAX));
        if !self.groups.contains_key(&key) {
            let k = self.game.k();
            let members = self.knowledge[n].clone();
            let mut carried = Vec::new();
            let mut by: BTreeMap<Observation, Vec<Member>> = BTreeMap::new();
            for m in members {
                match m {
                    Member::Pos(v) => {
                        let succ: Vec<Position> = if let Some(d) = digit {
                            vec![self.game.step(&v, &self.game.actions(&v)[d])?]
                        } else if self.game.is_nature(&v) {
                            self.game.successors(&v, &vec![])?
                        } else {
                            self.game.actions(&v).iter().map(|a| self.game.step(&v, a)).collect::<Result<_>>()?
                        };
                        for w in succ {
                            let o = self.game.observation(&w, 1);
                            by.entry(o).or_default().push(self.collapse(w));
                        }
                    }
                    Member::Won { i, r0 } => {
                        let (i, r0) = advance(k, i, r0);
                        carried.push(Member::Won { i, r0 });
                    }
                    Member::Lost { i, r0 } => {
                        let (i, r0) = advance(k, i, r0);
                        carried.push(Member::Lost { i, r0 });
                    }
                }
            }
            let mut out = BTreeMap::new();
            for (o, mut ms) in by {
                ms.extend(carried.iter().cloned());
                ms.sort();
                ms.dedup();
                out.insert(o, self.intern(ms)?);
            }
            let rest = if carried.is_empty() { None } else { Some(self.intern(carried)?) };
            self.groups.insert(key, Groups { by: out, rest });
        }
        Ok(&self.groups[&key])
    }

    fn group_of(&mut self, n: usize, digit: Option<usize>, w: &Position) -> Result<usize> {
        if !self.track {
            return Ok(0);
        }
        let o = self.game.observation(w, 1);
        self.groups(n, digit)?
            .by
            .get(&o)
            .copied()
            .ok_or_else(|| Error::Internal("successor missing from its knowledge set".into()))
    }

    fn initial_node(&mut self) -> Result<(usize, Member)> {
        let m = self.collapse(self.game.initial());
        let n = if self.track { self.intern(vec![m.clone()])? } else { 0 };
        Ok((n, m))
    }

    fn residual(&mut self, f: &mut Assign) -> Result<Residual> {
        let k = self.game.k();
        let mut r = Residual { nodes: vec![], index: HashMap::new(), arena: Arena::default() };
        let init = self.initial_node()?;
        r.index.insert(init.clone(), 0);
        r.nodes.push(init);
        let mut at = 0;
        while at < r.nodes.len() {
            let (n, m) = r.nodes[at].clone();
            let mut out: Vec<(usize, Member)> = Vec::new();
            let (owner, color) = match &m {
                Member::Won { .. } => {
                    out.push((n, m.clone()));
                    (0, 2)
                }
                Member::Lost { .. } => {
                    out.push((n, m.clone()));
                    (1, 1)
                }
                Member::Pos(v) => {
                    let i = v.subround().unwrap_or(0);
                    if self.game.is_nature(v) {
                        for w in self.game.successors(v, &vec![])? {
                            let n2 = self.group_of(n, None, &w)?;
                            out.push((n2, self.collapse(w)));
                        }
                        (1, self.game.color(v))
                    } else if i == k - 1 {
                        for a in self.game.actions(v) {
                            let w = self.game.step(v, &a)?;
                            let n2 = self.group_of(n, None, &w)?;
                            out.push((n2, self.collapse(w)));
                        }
                        (0, self.game.color(v))
                    } else {
                        let d = f.digit(n);
                        let w = self.game.step(v, &self.game.actions(v)[d])?;
                        let n2 = self.group_of(n, Some(d), &w)?;
                        out.push((n2, self.collapse(w)));
                        (0, self.game.color(v))
                    }
                }
            };
            let id = r.arena.add(owner, color);
            for x in out {
                let t = match r.index.get(&x) {
                    Some(&t) => t,
                    None => {
                        if r.nodes.len() >= self.budget {
                            return Err(Error::budget("arena nodes", self.budget));
                        }
                        r.index.insert(x.clone(), r.nodes.len());
                        r.nodes.push(x);
                        r.nodes.len() - 1
                    }
                };
                if !r.arena.succ[id].contains(&t) {
                    r.arena.succ[id].push(t);
                }
            }
            at += 1;
        }
        Ok(r)
    }

    /// Advances the odometer over Player 1's choices; false when exhausted.
    fn next_assignment(&self, f: &mut Assign) -> bool {
        f.digits.truncate(f.order.len());
        let mut found = false;
        for t in (0..f.order.len()).rev() {
            if f.digits[t] + 1 < self.choices(f.order[t]) {
                f.digits[t] += 1;
                f.digits.truncate(t + 1);
                found = true;
                break;
            }
        }
        f.order.clear();
        f.at.clear();
        found
    }

    fn collapsed_moves(&self, p: usize, i: usize, r0: bool) -> Action {
        if i != p {
            return vec![];
        }
        vec![0; if r0 { self.game.sched.delta[p] } else { 1 }]
    }

    fn machine_free(&mut self, r: &Residual, sol: &ParitySolution, f: &Assign) -> Result<MooreMachine> {
        let k = self.game.k();
        let p = k - 1;
        let mut ids: HashMap<Mem, usize> = HashMap::new();
        let mut order: Vec<Mem> = vec![Mem::Start];
        ids.insert(Mem::Start, 0);
        let mut mach = MooreMachine { player: p, initial: 0, moves: vec![], update: vec![], fallback: vec![] };
        let mut at = 0;
        while at < order.len() {
            let mem = order[at];
            let mut table: BTreeMap<String, Mem> = BTreeMap::new();
            let (mv, fb) = match mem {
                Mem::Start => {
                    let v = self.game.initial();
                    table.insert(obs_key(&self.game.observation(&v, p)), self.mem_of(r, &r.nodes[0]));
                    (vec![], Mem::Collapsed(0, true))
                }
                Mem::Collapsed(i, r0) => {
                    let (i2, r2) = advance(k, i, r0);
                    (self.collapsed_moves(p, i, r0), Mem::Collapsed(i2, r2))
                }
                Mem::Node(x) => {
                    let (n, m) = r.nodes[x].clone();
                    let Member::Pos(v) = m else { unreachable!() };
                    let i = v.subround().unwrap_or(0);
                    let (i2, r2) = advance(k, i, self.game.round_zero(&v));
                    let (succ, mv): (Vec<(Option<usize>, Position)>, Action) = if self.game.is_nature(&v) {
                        (self.game.successors(&v, &vec![])?.into_iter().map(|w| (None, w)).collect(), vec![])
                    } else if i == p {
                        let target = sol.strategy[x].ok_or_else(|| Error::Internal("winning node without a move".into()))?;
                        let acts = self.game.actions(&v);
                        let mut chosen = None;
                        for a in acts {
                            let w = self.game.step(&v, &a)?;
                            let n2 = self.group_of(n, None, &w)?;
                            if r.index.get(&(n2, self.collapse(w.clone()))) == Some(&target) {
                                chosen = Some((a, w));
                                break;
                            }
                        }
                        let (a, w) = chosen.ok_or_else(|| Error::Internal("strategy edge without an action".into()))?;
                        (vec![(None, w)], a)
                    } else {
                        let d = f.get(n);
                        (vec![(Some(d), self.game.step(&v, &self.game.actions(&v)[d])?)], vec![])
                    };
                    for (d, w) in succ {
                        let n2 = self.group_of(n, d, &w)?;
                        let key = (n2, self.collapse(w.clone()));
                        let y = *r.index.get(&key).ok_or_else(|| Error::Internal("successor outside the arena".into()))?;
                        let next = self.mem_of(r, &r.nodes[y]);
                        let o = obs_key(&self.game.observation(&w, p));
                        if let Some(prev) = table.insert(o, next) {
                            if prev != next {
                                return Err(Error::Internal(format!("Player {p} cannot tell two successors apart")));
                            }
                        }
                    }
                    (mv, Mem::Collapsed(i2, r2))
                }
            };
            let mut row = BTreeMap::new();
            for (o, m) in table.into_iter().chain([("".to_string(), fb)]) {
                let id = *ids.entry(m).or_insert_with(|| {
                    order.push(m);
                    order.len() - 1
                });
                if !o.is_empty() {
                    row.insert(o, id);
                } else {
                    mach.fallback.push(id);
                }
            }
            mach.update.push(row);
            mach.moves.push(mv);
            at += 1;
        }
        Ok(mach)
    }

    fn mem_of(&self, r: &Residual, x: &(usize, Member)) -> Mem {
        match &x.1 {
            Member::Pos(_) => Mem::Node(r.index[x]),
            Member::Won { i, r0 } | Member::Lost { i, r0 } => Mem::Collapsed(*i, *r0),
        }
    }

    fn knowledge_mem(&self, n: usize) -> Mem {
        if self.has_pos(n) {
            Mem::Node(n)
        } else {
            let (i, r0) = self.phase(n);
            Mem::Collapsed(i, r0)
        }
    }

    fn machine_tracked(&mut self, p: usize, f: &Assign) -> Result<MooreMachine> {
        let k = self.game.k();
        let (n0, _) = self.initial_node()?;
        let mut ids: HashMap<Mem, usize> = HashMap::new();
        let mut order: Vec<Mem> = vec![Mem::Start];
        ids.insert(Mem::Start, 0);
        let mut mach = MooreMachine { player: p, initial: 0, moves: vec![], update: vec![], fallback: vec![] };
        let mut at = 0;
        while at < order.len() {
            if order.len() > self.budget {
                return Err(Error::budget("strategy memory", self.budget));
            }
            let mem = order[at];
            let mut table: Vec<(String, Mem)> = Vec::new();
            let (mv, fb) = match mem {
                Mem::Start => {
                    let o = obs_key(&self.game.observation(&self.game.initial(), p));
                    table.push((o, self.knowledge_mem(n0)));
                    (vec![], Mem::Collapsed(0, true))
                }
                Mem::Collapsed(i, r0) => {
                    let (i2, r2) = advance(k, i, r0);
                    (self.collapsed_moves(p, i, r0), Mem::Collapsed(i2, r2))
                }
                Mem::Node(n) => {
                    let (i, r0) = self.phase(n);
                    let digit = if i == p { Some(f.get(n)) } else { None };
                    let mv = match digit {
                        Some(d) => {
                            let v = self.knowledge[n].iter().find_map(|m| if let Member::Pos(v) = m { Some(v.clone()) } else { None }).unwrap();
                            self.game.actions(&v)[d].clone()
                        }
                        None => vec![],
                    };
                    let g = self.groups(n, digit)?;
                    let by: Vec<(Observation, usize)> = g.by.iter().map(|(o, &n2)| (o.clone(), n2)).collect();
                    let rest = g.rest;
                    for (o, n2) in by {
                        table.push((obs_key(&o), self.knowledge_mem(n2)));
                    }
                    let (i2, r2) = advance(k, i, r0);
                    (mv, rest.map_or(Mem::Collapsed(i2, r2), |n2| self.knowledge_mem(n2)))
                }
            };
            let mut row = BTreeMap::new();
            for (o, m) in table.into_iter().chain([("".to_string(), fb)]) {
                let id = *ids.entry(m).or_insert_with(|| {
                    order.push(m);
                    order.len() - 1
                });
                if !o.is_empty() {
                    row.insert(o, id);
                } else {
                    mach.fallback.push(id);
                }
            }
            mach.update.push(row);
            mach.moves.push(mv);
            at += 1;
        }
        Ok(mach)
    }
}

/// Searches for a winning strategy profile.
///
/// `Ok(None)` is only returned when no winning profile exists. When the
/// search cannot settle the question within its limits the result is an
/// [`Error::Budget`] or [`Error::Incomplete`], never `None`.
pub fn solve_hierarchical(game: &Game, opts: SolveOptions) -> Result<Option<StrategyProfile>> {
    let k = game.k();
    if k > 4 {
        return Err(Error::Incomplete(format!("games with {} existential players are not supported", k / 2)));
    }
    let mut s = Solver::new(game, opts.budget);
    let mut f = Assign::default();
    for _ in 0..opts.attempts.max(1) {
        let r = s.residual(&mut f)?;
        let sol = solve_parity(&r.arena);
        if sol.winner[0] == 0 {
            let mut machines = Vec::new();
            if s.track {
                machines.push(s.machine_tracked(1, &f)?);
            }
            machines.push(s.machine_free(&r, &sol, &f)?);
            let profile = StrategyProfile { machines };
            assert!(verify_profile(game, &profile, opts.budget)?, "solver produced a losing profile");
            return Ok(Some(profile));
        }
        if !s.track {
            return Ok(None);
        }
        if !s.next_assignment(&mut f) {
            return Err(Error::Incomplete("no Player-1 strategy on knowledge sets wins".into()));
        }
    }
    Err(Error::Incomplete(format!("Player-1 strategy search stopped after {} attempts", opts.attempts)))
}

/// Plays the profile against every behaviour of Nature and checks that no
/// outcome loses: the sink is unreachable and every reachable cycle has an
/// even maximal color. Exploration stops at positions whose automaton state
/// accepts every word.
pub fn verify_profile(game: &Game, profile: &StrategyProfile, budget: usize) -> Result<bool> {
    let (all, none) = game.dpa.verdicts();
    let mut machines = Vec::new();
    for p in game.players() {
        machines.push(profile.machine(p).ok_or_else(|| Error::Shape(format!("no strategy for Player {p}")))?);
    }
    let observe = |v: &Position, mems: &[usize]| -> Vec<usize> {
        machines.iter().zip(mems).map(|(m, &x)| m.step(x, &game.observation(v, m.player))).collect()
    };
    let v0 = game.initial();
    let m0 = observe(&v0, &machines.iter().map(|m| m.initial).collect::<Vec<_>>());
    let mut index: HashMap<(Position, Vec<usize>), usize> = HashMap::new();
    let mut states = vec![(v0, m0)];
    index.insert(states[0].clone(), 0);
    let mut adj: Vec<Vec<usize>> = Vec::new();
    let mut color = Vec::new();
    let mut at = 0;
    while at < states.len() {
        let (v, mems) = states[at].clone();
        let Position::Play { i, q, .. } = &v else { return Ok(false) };
        if none[*q as usize] {
            return Ok(false);
        }
        if all[*q as usize] {
            adj.push(vec![at]);
            color.push(2);
            at += 1;
            continue;
        }
        let succ: Vec<Position> = if game.is_nature(&v) {
            game.successors(&v, &vec![])?
        } else {
            let m = machines.iter().position(|m| m.player == *i).expect("player has a machine");
            let a = machines[m].next_move(mems[m]);
            let n = game.sched.block_count(*i);
            if a.iter().any(|&b| b as usize >= n) {
                vec![Position::Sink]
            } else {
                vec![game.step(&v, a)?]
            }
        };
        let mut out = Vec::new();
        for w in succ {
            let key = (w.clone(), observe(&w, &mems));
            let id = match index.get(&key) {
                Some(&id) => id,
                None => {
                    if states.len() >= budget {
                        return Err(Error::budget("profile outcomes", budget));
                    }
                    index.insert(key.clone(), states.len());
                    states.push(key);
                    states.len() - 1
                }
            };
            out.push(id);
        }
        adj.push(out);
        color.push(game.color(&v));
        at += 1;
    }
    Ok(!graph::has_odd_cycle(&adj, &color, &vec![true; adj.len()]))
}
