//! JSON import/export and HOA export.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::{Alphabet, Dpa, Nba};
use crate::error::{Error, Result};

/// JSON form shared by both automaton kinds. `accepting` is set for Büchi
/// automata and `colors` for parity automata (max-even).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AutomatonJson {
    pub kind: String,
    pub props: usize,
    pub arity: usize,
    pub states: usize,
    pub initial: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub accepting: Option<Vec<u32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub colors: Option<Vec<u32>>,
    /// `[from, letter, to]` triples.
    pub transitions: Vec<[u32; 3]>,
}

impl From<&Nba> for AutomatonJson {
    fn from(a: &Nba) -> Self {
        let mut transitions = Vec::new();
        for q in 0..a.len() as u32 {
            for l in a.alphabet.letters() {
                for &t in a.succ(q, l) {
                    transitions.push([q, l, t]);
                }
            }
        }
        AutomatonJson {
            kind: "nba".into(),
            props: a.alphabet.props,
            arity: a.alphabet.arity,
            states: a.len(),
            initial: a.initial,
            accepting: Some((0..a.len() as u32).filter(|&q| a.accepting[q as usize]).collect()),
            colors: None,
            transitions,
        }
    }
}

impl From<&Dpa> for AutomatonJson {
    fn from(d: &Dpa) -> Self {
        let mut transitions = Vec::new();
        for q in 0..d.len() as u32 {
            for l in d.alphabet.letters() {
                transitions.push([q, l, d.next(q, l)]);
            }
        }
        AutomatonJson {
            kind: "dpa".into(),
            props: d.alphabet.props,
            arity: d.alphabet.arity,
            states: d.len(),
            initial: d.initial,
            accepting: None,
            colors: Some(d.color.clone()),
            transitions,
        }
    }
}

impl AutomatonJson {
    fn check(&self, kind: &str) -> Result<Alphabet> {
        if self.kind != kind {
            return Err(Error::Format(format!("expected a {kind}, found {}", self.kind)));
        }
        if self.initial as usize >= self.states {
            return Err(Error::Format("initial state out of range".into()));
        }
        let al = Alphabet::new(self.props, self.arity);
        for t in &self.transitions {
            if t[0] as usize >= self.states || t[2] as usize >= self.states || t[1] as usize >= al.size() {
                return Err(Error::Format(format!("transition {t:?} out of range")));
            }
        }
        Ok(al)
    }

    pub fn to_nba(&self) -> Result<Nba> {
        let al = self.check("nba")?;
        let mut a = Nba::new(al, self.states);
        a.initial = self.initial;
        for &q in self.accepting.as_deref().unwrap_or(&[]) {
            *a.accepting.get_mut(q as usize).ok_or_else(|| Error::Format("accepting state out of range".into()))? = true;
        }
        for t in &self.transitions {
            a.add(t[0], t[1], t[2]);
        }
        Ok(a)
    }

    pub fn to_dpa(&self) -> Result<Dpa> {
        let al = self.check("dpa")?;
        let colors = self.colors.clone().ok_or_else(|| Error::Format("missing colors".into()))?;
        if colors.len() != self.states {
            return Err(Error::Format("one color per state expected".into()));
        }
        let mut delta = vec![u32::MAX; self.states * al.size()];
        for t in &self.transitions {
            let slot = &mut delta[t[0] as usize * al.size() + t[1] as usize];
            if *slot != u32::MAX && *slot != t[2] {
                return Err(Error::Format("nondeterministic transition in a dpa".into()));
            }
            *slot = t[2];
        }
        if delta.contains(&u32::MAX) {
            return Err(Error::Format("dpa transition function is not total".into()));
        }
        Ok(Dpa { alphabet: al, initial: self.initial, delta, color: colors })
    }
}

/// Export in the Hanoi Omega-Automata format. Atomic proposition `p` of
/// component `j` is named `"ap@j"`.
pub trait HoaExport {
    fn to_hoa(&self, aps: &[String]) -> String;
}

fn ap_header(al: &Alphabet, aps: &[String]) -> String {
    let names: Vec<String> =
        (0..al.arity).flat_map(|j| aps.iter().map(move |a| format!("\"{a}@{j}\""))).collect();
    format!("AP: {} {}", names.len(), names.join(" "))
}

fn label(al: &Alphabet, letter: u32) -> String {
    let bits = al.props * al.arity;
    if bits == 0 {
        return "t".into();
    }
    (0..bits).map(|b| if letter >> b & 1 == 1 { b.to_string() } else { format!("!{b}") }).collect::<Vec<_>>().join("&")
}

impl HoaExport for Nba {
    fn to_hoa(&self, aps: &[String]) -> String {
        let mut out = String::from("HOA: v1\n");
        let _ = writeln!(out, "States: {}", self.len());
        let _ = writeln!(out, "Start: {}", self.initial);
        let _ = writeln!(out, "{}", ap_header(&self.alphabet, aps));
        out.push_str("acc-name: Buchi\nAcceptance: 1 Inf(0)\nproperties: explicit-labels state-acc\n--BODY--\n");
        for q in 0..self.len() {
            let acc = if self.accepting[q] { " {0}" } else { "" };
            let _ = writeln!(out, "State: {q}{acc}");
            for l in self.alphabet.letters() {
                for &t in self.succ(q as u32, l) {
                    let _ = writeln!(out, "[{}] {t}", label(&self.alphabet, l));
                }
            }
        }
        out.push_str("--END--\n");
        out
    }
}

fn parity_max_even(sets: u32) -> String {
    // Inf(n-1) | (Fin(n-2) & (Inf(n-3) | ...)) with the top set even
    fn build(c: i64) -> String {
        if c < 0 {
            return "f".into();
        }
        if c % 2 == 0 {
            let rest = build(c - 1);
            if rest == "f" {
                format!("Inf({c})")
            } else {
                format!("Inf({c}) | {rest}")
            }
        } else {
            let rest = build(c - 1);
            if rest == "f" {
                "f".into()
            } else {
                format!("(Fin({c}) & ({rest}))")
            }
        }
    }
    build(sets as i64 - 1)
}

impl HoaExport for Dpa {
    fn to_hoa(&self, aps: &[String]) -> String {
        let sets = self.max_color() + 1;
        let mut out = String::from("HOA: v1\n");
        let _ = writeln!(out, "States: {}", self.len());
        let _ = writeln!(out, "Start: {}", self.initial);
        let _ = writeln!(out, "{}", ap_header(&self.alphabet, aps));
        let _ = writeln!(out, "acc-name: parity max even {sets}");
        let _ = writeln!(out, "Acceptance: {sets} {}", parity_max_even(sets));
        out.push_str("properties: explicit-labels state-acc deterministic complete\n--BODY--\n");
        for q in 0..self.len() {
            let _ = writeln!(out, "State: {q} {{{}}}", self.color[q]);
            for l in self.alphabet.letters() {
                let _ = writeln!(out, "[{}] {}", label(&self.alphabet, l), self.next(q as u32, l));
            }
        }
        out.push_str("--END--\n");
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip() {
        let mut a = Nba::new(Alphabet::new(1, 2), 2);
        a.accepting[1] = true;
        a.add(0, 3, 1);
        a.add(1, 0, 0);
        let j = AutomatonJson::from(&a);
        let text = serde_json::to_string(&j).unwrap();
        let back: AutomatonJson = serde_json::from_str(&text).unwrap();
        assert_eq!(back.to_nba().unwrap(), a);

        let d = Dpa { alphabet: Alphabet::new(1, 1), initial: 0, delta: vec![0, 1, 0, 1], color: vec![1, 2] };
        assert_eq!(AutomatonJson::from(&d).to_dpa().unwrap(), d);
        assert!(AutomatonJson::from(&d).to_nba().is_err());
    }

    #[test]
    fn hoa_headers() {
        let d = Dpa { alphabet: Alphabet::new(1, 1), initial: 0, delta: vec![0, 1, 0, 1], color: vec![1, 2] };
        let h = d.to_hoa(&["a".into()]);
        assert!(h.contains("acc-name: parity max even 3"));
        assert!(h.contains("Acceptance: 3 Inf(2) | (Fin(1) & (Inf(0)))"));
        assert!(h.contains("[!0] 0"));
    }
}
