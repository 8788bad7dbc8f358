//! Finite transition systems and labeled-path reachability.
//!
//! Text format (one declaration per line, `#` comments):
//!
//! ```text
//! version: 1          # optional
//! aps: a b
//! vertex v0 {} initial
//! vertex v1 {a,b}
//! edge v0 v1
//! ```
//!
//! The JSON form carries the same data:
//! `{"aps": [...], "vertices": [{"name", "label", "initial"}], "edges": [[u, v]]}`.
//!
//! Labels are bitmasks over the proposition list, bit `j` standing for `aps[j]`.
//! Paths consume the labels of every vertex except the endpoint, so
//! [`TransitionSystem::reach_matrix`] is a monoid morphism from words to
//! boolean matrices.

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::automata::Lasso;
use crate::error::{Error, Result};

pub const FORMAT_VERSION: u32 = 1;
pub const MAX_VERTICES: usize = 64;

/// Set of vertices as a bitmask.
pub type VSet = u64;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransitionSystem {
    pub aps: Vec<String>,
    pub names: Vec<String>,
    pub labels: Vec<u32>,
    pub succ: Vec<Vec<usize>>,
    pub initial: usize,
}

#[derive(Serialize, Deserialize)]
struct JsonVertex {
    name: String,
    #[serde(default)]
    label: Vec<String>,
    #[serde(default)]
    initial: bool,
}

#[derive(Serialize, Deserialize)]
struct JsonSystem {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    version: Option<u32>,
    aps: Vec<String>,
    vertices: Vec<JsonVertex>,
    edges: Vec<(String, String)>,
}

struct Builder {
    aps: Vec<String>,
    names: Vec<String>,
    index: HashMap<String, usize>,
    labels: Vec<u32>,
    initial: Option<usize>,
    edges: Vec<(String, String)>,
}

impl Builder {
    fn new(aps: Vec<String>) -> Result<Self> {
        if aps.len() > 16 {
            return Err(Error::SystemParse("at most 16 atomic propositions are supported".into()));
        }
        let mut seen = BTreeSet::new();
        for a in &aps {
            if !seen.insert(a) {
                return Err(Error::SystemParse(format!("proposition `{a}` declared twice")));
            }
        }
        Ok(Builder { aps, names: vec![], index: HashMap::new(), labels: vec![], initial: None, edges: vec![] })
    }

    fn vertex(&mut self, name: &str, label: &[String], initial: bool) -> Result<()> {
        if self.index.contains_key(name) {
            return Err(Error::SystemParse(format!("vertex `{name}` declared twice")));
        }
        let mut mask = 0u32;
        for p in label {
            let j = self
                .aps
                .iter()
                .position(|a| a == p)
                .ok_or_else(|| Error::UnknownProposition(p.clone()))?;
            mask |= 1 << j;
        }
        let id = self.names.len();
        if initial {
            if self.initial.is_some() {
                return Err(Error::SystemParse("more than one initial vertex".into()));
            }
            self.initial = Some(id);
        }
        self.index.insert(name.to_string(), id);
        self.names.push(name.to_string());
        self.labels.push(mask);
        Ok(())
    }

    fn finish(self) -> Result<TransitionSystem> {
        let n = self.names.len();
        if n == 0 {
            return Err(Error::SystemParse("no vertices".into()));
        }
        if n > MAX_VERTICES {
            return Err(Error::SystemParse(format!("at most {MAX_VERTICES} vertices are supported")));
        }
        let initial = self.initial.ok_or_else(|| Error::SystemParse("no initial vertex".into()))?;
        let mut succ = vec![Vec::new(); n];
        for (u, v) in &self.edges {
            let lookup = |x: &String| {
                self.index.get(x).copied().ok_or_else(|| Error::SystemParse(format!("edge mentions unknown vertex `{x}`")))
            };
            let (u, v) = (lookup(u)?, lookup(v)?);
            if !succ[u].contains(&v) {
                succ[u].push(v);
            }
        }
        for (v, s) in succ.iter_mut().enumerate() {
            if s.is_empty() {
                return Err(Error::DeadEnd(self.names[v].clone()));
            }
            s.sort_unstable();
        }
        Ok(TransitionSystem { aps: self.aps, names: self.names, labels: self.labels, succ, initial })
    }
}

fn parse_label(text: &str, line: usize) -> Result<Vec<String>> {
    let inner = text
        .strip_prefix('{')
        .and_then(|t| t.strip_suffix('}'))
        .ok_or_else(|| Error::SystemParse(format!("line {line}: label must look like {{a,b}}")))?;
    Ok(inner.split(',').map(str::trim).filter(|s| !s.is_empty()).map(String::from).collect())
}

impl TransitionSystem {
    /// Parses either the line format or the JSON form (detected by a leading `{`).
    pub fn parse(text: &str) -> Result<Self> {
        if text.trim_start().starts_with('{') {
            return Self::from_json(text);
        }
        let mut builder: Option<Builder> = None;
        for (no, raw) in text.lines().enumerate() {
            let line_no = no + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix("version:") {
                let v: u32 = rest
                    .trim()
                    .parse()
                    .map_err(|_| Error::SystemParse(format!("line {line_no}: bad version")))?;
                if v != FORMAT_VERSION {
                    return Err(Error::Version { expected: FORMAT_VERSION, found: v });
                }
                continue;
            }
            if let Some(rest) = line.strip_prefix("aps:") {
                if builder.is_some() {
                    return Err(Error::SystemParse(format!("line {line_no}: `aps:` given twice")));
                }
                builder = Some(Builder::new(rest.split_whitespace().map(String::from).collect())?);
                continue;
            }
            let b = builder
                .as_mut()
                .ok_or_else(|| Error::SystemParse(format!("line {line_no}: `aps:` header must come first")))?;
            let mut words = line.splitn(2, char::is_whitespace);
            let kw = words.next().unwrap_or("");
            let rest = words.next().unwrap_or("").trim();
            match kw {
                "vertex" => {
                    let (name, rest) = rest.split_once(char::is_whitespace).unwrap_or((rest, ""));
                    if name.is_empty() {
                        return Err(Error::SystemParse(format!("line {line_no}: vertex needs a name")));
                    }
                    let rest = rest.trim();
                    let close = rest
                        .find('}')
                        .ok_or_else(|| Error::SystemParse(format!("line {line_no}: missing label")))?;
                    let label = parse_label(&rest[..=close], line_no)?;
                    let flag = rest[close + 1..].trim();
                    let initial = match flag {
                        "" => false,
                        "initial" => true,
                        other => {
                            return Err(Error::SystemParse(format!("line {line_no}: unexpected `{other}`")))
                        }
                    };
                    b.vertex(name, &label, initial)?;
                }
                "edge" => {
                    let parts: Vec<&str> = rest.split_whitespace().collect();
                    if parts.len() != 2 {
                        return Err(Error::SystemParse(format!("line {line_no}: edge needs two vertices")));
                    }
                    b.edges.push((parts[0].to_string(), parts[1].to_string()));
                }
                other => return Err(Error::SystemParse(format!("line {line_no}: unknown keyword `{other}`"))),
            }
        }
        builder.ok_or_else(|| Error::SystemParse("missing `aps:` header".into()))?.finish()
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: JsonSystem = serde_json::from_str(text).map_err(|e| Error::SystemParse(e.to_string()))?;
        if let Some(v) = doc.version {
            if v != FORMAT_VERSION {
                return Err(Error::Version { expected: FORMAT_VERSION, found: v });
            }
        }
        let mut b = Builder::new(doc.aps)?;
        for v in &doc.vertices {
            b.vertex(&v.name, &v.label, v.initial)?;
        }
        b.edges = doc.edges;
        b.finish()
    }

    pub fn to_json(&self) -> String {
        let doc = JsonSystem {
            version: Some(FORMAT_VERSION),
            aps: self.aps.clone(),
            vertices: (0..self.len())
                .map(|v| JsonVertex {
                    name: self.names[v].clone(),
                    label: self.label_names(self.labels[v]),
                    initial: v == self.initial,
                })
                .collect(),
            edges: self.edges().map(|(u, v)| (self.names[u].clone(), self.names[v].clone())).collect(),
        };
        serde_json::to_string_pretty(&doc).expect("serializable")
    }

    /// Canonical line format; parsing it back yields an equal system.
    pub fn to_text(&self) -> String {
        let mut out = format!("version: {FORMAT_VERSION}\naps: {}\n", self.aps.join(" "));
        for v in 0..self.len() {
            let label = self.label_names(self.labels[v]).join(",");
            let flag = if v == self.initial { " initial" } else { "" };
            let _ = writeln!(out, "vertex {} {{{label}}}{flag}", self.names[v]);
        }
        for (u, v) in self.edges() {
            let _ = writeln!(out, "edge {} {}", self.names[u], self.names[v]);
        }
        out
    }

    /// SHA-256 of the canonical text form.
    pub fn digest(&self) -> String {
        hex::encode(Sha256::digest(self.to_text().as_bytes()))
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn num_props(&self) -> usize {
        self.aps.len()
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.succ.iter().enumerate().flat_map(|(u, s)| s.iter().map(move |&v| (u, v)))
    }

    pub fn label_names(&self, mask: u32) -> Vec<String> {
        (0..self.aps.len()).filter(|j| mask >> j & 1 == 1).map(|j| self.aps[j].clone()).collect()
    }

    pub fn prop_index(&self, name: &str) -> Option<usize> {
        self.aps.iter().position(|a| a == name)
    }

    /// Vertices reachable from `from` by one step reading `letter` at the source.
    pub fn post(&self, from: VSet, letter: u32) -> VSet {
        let mut out = 0;
        for v in iter_set(from) {
            if self.labels[v] == letter {
                for &w in &self.succ[v] {
                    out |= 1 << w;
                }
            }
        }
        out
    }

    pub fn initial_set(&self) -> VSet {
        1 << self.initial
    }

    pub fn letter_matrix(&self, letter: u32) -> ReachMatrix {
        let n = self.len();
        let rows = (0..n)
            .map(|u| if self.labels[u] == letter { self.succ[u].iter().fold(0, |m, &v| m | 1 << v) } else { 0 })
            .collect();
        ReachMatrix { n, rows }
    }

    pub fn reach_matrix(&self, word: &[u32]) -> ReachMatrix {
        word.iter()
            .fold(ReachMatrix::identity(self.len()), |acc, &l| acc.compose(&self.letter_matrix(l)))
    }

    /// Whether `word` is a prefix of some trace.
    pub fn is_trace_prefix(&self, word: &[u32]) -> bool {
        word.iter().try_fold(self.initial_set(), |s, &l| Some(self.post(s, l)).filter(|&s| s != 0)).is_some()
    }

    /// Whether the lasso is a trace. Trace sets are closed, so it suffices that
    /// every prefix is a trace prefix.
    pub fn accepts_lasso(&self, lasso: &Lasso) -> bool {
        let mut s = self.initial_set();
        for &l in &lasso.prefix {
            s = self.post(s, l);
            if s == 0 {
                return false;
            }
        }
        let mut seen = BTreeSet::new();
        while seen.insert(s) {
            for &l in &lasso.cycle {
                s = self.post(s, l);
                if s == 0 {
                    return false;
                }
            }
        }
        true
    }

    /// A fixed trace: follow the smallest successor from the initial vertex.
    pub fn canonical_lasso(&self) -> Lasso {
        let mut order = Vec::new();
        let mut pos = HashMap::new();
        let mut v = self.initial;
        while !pos.contains_key(&v) {
            pos.insert(v, order.len());
            order.push(v);
            v = self.succ[v][0];
        }
        let start = pos[&v];
        let labels: Vec<u32> = order.iter().map(|&u| self.labels[u]).collect();
        Lasso::new(labels[..start].to_vec(), labels[start..].to_vec())
    }

    /// Distinct letters that can extend a path ending in `from`.
    pub fn next_letters(&self, from: VSet) -> Vec<u32> {
        let set: BTreeSet<u32> = iter_set(from).map(|v| self.labels[v]).collect();
        set.into_iter().collect()
    }

    /// All words of length `len` that keep a path alive from `from`, in
    /// lexicographic letter order, at most `limit` of them.
    pub fn continuations(&self, from: VSet, len: usize, limit: usize) -> Vec<Vec<u32>> {
        let mut out = Vec::new();
        let mut word = Vec::new();
        self.extend_words(from, len, limit, &mut word, &mut out);
        out
    }

    fn extend_words(&self, from: VSet, len: usize, limit: usize, word: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if out.len() >= limit {
            return;
        }
        if word.len() == len {
            out.push(word.clone());
            return;
        }
        for l in self.next_letters(from) {
            word.push(l);
            self.extend_words(self.post(from, l), len, limit, word, out);
            word.pop();
        }
    }
}

pub fn iter_set(s: VSet) -> impl Iterator<Item = usize> {
    (0..64).filter(move |i| s >> i & 1 == 1)
}

/// Boolean matrix over vertices, one bitmask per row.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ReachMatrix {
    pub n: usize,
    pub rows: Vec<u64>,
}

impl ReachMatrix {
    pub fn identity(n: usize) -> Self {
        ReachMatrix { n, rows: (0..n).map(|i| 1u64 << i).collect() }
    }

    pub fn get(&self, u: usize, v: usize) -> bool {
        self.rows[u] >> v & 1 == 1
    }

    /// Boolean product `self · other`.
    pub fn compose(&self, other: &ReachMatrix) -> ReachMatrix {
        let rows = self.rows.iter().map(|&r| iter_set(r).fold(0, |m, k| m | other.rows[k])).collect();
        ReachMatrix { n: self.n, rows }
    }

    /// Vertices reachable from some vertex in `from`.
    pub fn image(&self, from: VSet) -> VSet {
        iter_set(from).fold(0, |m, u| m | self.rows[u])
    }
}
