//! Reference semantics on ultimately periodic traces and automata-based model checking.

use std::collections::BTreeMap;

use crate::automata::{determinize, ltl_to_nba, product_with_ts, trace_automaton, Alphabet, Lasso, Nba};
use crate::error::{Error, Result};
use crate::syntax::{HyperFormula, Ltl, Quantifier};
use crate::ts::TransitionSystem;

pub const DEFAULT_BUDGET: usize = 1_000_000;

/// Partial map from trace variables to lassos over `2^aps`.
#[derive(Debug, Clone, Default)]
pub struct TraceAssignment {
    pub aps: Vec<String>,
    pub traces: BTreeMap<String, Lasso>,
}

impl TraceAssignment {
    pub fn new(aps: &[String]) -> Self {
        TraceAssignment { aps: aps.to_vec(), traces: BTreeMap::new() }
    }

    pub fn with(mut self, var: &str, trace: Lasso) -> Self {
        self.traces.insert(var.to_string(), trace);
        self
    }
}

/// Truth of `matrix` at position 0 under the assignment.
pub fn eval_matrix(matrix: &Ltl, assignment: &TraceAssignment) -> Result<bool> {
    let vars: Vec<String> = assignment.traces.keys().cloned().collect();
    for v in matrix.variables() {
        if !assignment.traces.contains_key(&v) {
            return Err(Error::Unassigned(v));
        }
    }
    let al = Alphabet::new(assignment.aps.len(), vars.len());
    let parts: Vec<Lasso> = vars.iter().map(|v| assignment.traces[v].clone()).collect();
    eval_matrix_zipped(matrix, &vars, &assignment.aps, &Lasso::zip(&al, &parts))
}

/// Truth of `matrix` on a zipped tuple lasso whose component `j` is `vars[j]`.
pub fn eval_matrix_zipped(matrix: &Ltl, vars: &[String], aps: &[String], w: &Lasso) -> Result<bool> {
    let len = w.prefix.len() + w.cycle.len();
    let next: Vec<usize> = (0..len).map(|p| if p + 1 < len { p + 1 } else { w.prefix.len() }).collect();
    let letters: Vec<u32> = (0..len).map(|p| w.at(p)).collect();
    let v = eval_positions(&matrix.expand(), vars, aps, &letters, &next)?;
    Ok(v[0])
}

fn eval_positions(f: &Ltl, vars: &[String], aps: &[String], letters: &[u32], next: &[usize]) -> Result<Vec<bool>> {
    let len = letters.len();
    Ok(match f {
        Ltl::True => vec![true; len],
        Ltl::False => vec![false; len],
        Ltl::Atom { prop, var } => {
            let j = vars.iter().position(|v| v == var).ok_or_else(|| Error::Unassigned(var.clone()))?;
            let p = aps.iter().position(|a| a == prop).ok_or_else(|| Error::UnknownProposition(prop.clone()))?;
            let bit = j * aps.len() + p;
            letters.iter().map(|l| l >> bit & 1 == 1).collect()
        }
        Ltl::Not(a) => eval_positions(a, vars, aps, letters, next)?.into_iter().map(|b| !b).collect(),
        Ltl::And(a, b) | Ltl::Or(a, b) => {
            let x = eval_positions(a, vars, aps, letters, next)?;
            let y = eval_positions(b, vars, aps, letters, next)?;
            let and = matches!(f, Ltl::And(..));
            x.iter().zip(&y).map(|(&p, &q)| if and { p && q } else { p || q }).collect()
        }
        Ltl::Next(a) => {
            let x = eval_positions(a, vars, aps, letters, next)?;
            (0..len).map(|p| x[next[p]]).collect()
        }
        Ltl::Until(a, b) => {
            let x = eval_positions(a, vars, aps, letters, next)?;
            let y = eval_positions(b, vars, aps, letters, next)?;
            let mut v = vec![false; len];
            loop {
                let nv: Vec<bool> = (0..len).map(|p| y[p] || (x[p] && v[next[p]])).collect();
                if nv == v {
                    break v;
                }
                v = nv;
            }
        }
        other => return eval_positions(&other.expand(), vars, aps, letters, next),
    })
}

fn complement_nba(a: &Nba, budget: usize) -> Result<Nba> {
    Ok(determinize(a, budget)?.complement().to_nba())
}

/// Decides `ts ⊨ f` by eliminating quantifiers from the innermost outwards.
/// Each intermediate automaton accepts the tuples of traces, one per bound
/// variable, that satisfy the remaining subformula.
pub fn model_check(ts: &TransitionSystem, f: &HyperFormula, budget: usize) -> Result<bool> {
    let vars = f.variables();
    let matrix = ltl_to_nba(&f.matrix, &vars, &ts.aps)?;
    let mut lang = product_with_ts(&matrix, ts)?;
    for i in (0..vars.len()).rev() {
        let keep: Vec<usize> = (0..i).collect();
        lang = match f.prefix[i].quantifier {
            Quantifier::Exists => lang.project(&keep)?,
            Quantifier::Forall => {
                let failing = complement_nba(&lang, budget)?.intersect(&trace_automaton(ts, i + 1))?;
                let some_failing = failing.project(&keep)?;
                complement_nba(&some_failing, budget)?.intersect(&trace_automaton(ts, i))?
            }
        };
        if lang.len() > budget {
            return Err(Error::budget("model checking automaton states", budget));
        }
    }
    Ok(!lang.is_empty())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_formula;

    const DELAYED: &str = "aps: a\nvertex v0 {} initial\nvertex v1 {a}\nedge v0 v0\nedge v0 v1\nedge v1 v0\nedge v1 v1\n";
    const LOOP: &str = "aps: a\nvertex s {} initial\nedge s s\n";

    fn aps() -> Vec<String> {
        vec!["a".into()]
    }

    #[test]
    fn eval_examples() {
        let f = parse_formula("forall p, q. G (a[p] <-> a[q])").unwrap();
        let t = Lasso::new(vec![0], vec![1, 0]);
        let asg = TraceAssignment::new(&aps()).with("p", t.clone()).with("q", t);
        assert!(eval_matrix(&f.matrix, &asg).unwrap());

        let g = parse_formula("forall p, q. (F a[p]) <-> (X a[q])").unwrap();
        let t = Lasso::new(vec![0], vec![1]);
        let asg = TraceAssignment::new(&aps()).with("p", t.clone()).with("q", t);
        assert!(eval_matrix(&g.matrix, &asg).unwrap());

        let h = parse_formula("forall p. X a[p]").unwrap();
        let asg = TraceAssignment::new(&aps()).with("p", Lasso::new(vec![0], vec![0]));
        assert!(!eval_matrix(&h.matrix, &asg).unwrap());
        assert!(matches!(eval_matrix(&h.matrix, &TraceAssignment::new(&aps())), Err(Error::Unassigned(_))));
    }

    #[test]
    fn model_check_examples() {
        let free = TransitionSystem::parse(DELAYED).unwrap();
        let lp = TransitionSystem::parse(LOOP).unwrap();
        let delayed = parse_formula("forall p. exists q. (F a[p]) <-> (X a[q])").unwrap();
        assert!(model_check(&free, &delayed, DEFAULT_BUDGET).unwrap());
        assert!(!model_check(&free, &delayed.negate(), DEFAULT_BUDGET).unwrap());
        let id = parse_formula("forall p, q. G (i[p] <-> i[q]) -> G (o[p] <-> o[q])").unwrap();
        let lp_io = TransitionSystem::parse("aps: i o\nvertex s {} initial\nedge s s\n").unwrap();
        assert!(model_check(&lp_io, &id, DEFAULT_BUDGET).unwrap());
        let fa = parse_formula("forall p. F a[p]").unwrap();
        assert!(!model_check(&lp, &fa, DEFAULT_BUDGET).unwrap());
    }
}
