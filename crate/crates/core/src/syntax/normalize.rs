//! Alternation normal form.
//!
//! Adjacent variables with the same quantifier are merged into one block, a
//! leading `exists` block gets a dummy `forall` block in front, and a trailing
//! `forall` block gets a dummy `exists` block behind. The result alternates
//! `forall`, `exists`, ..., `exists` and has an even number of blocks.
//!
//! Padding with a dummy universal is harmless for witness existence: a witness
//! that reads the dummy trace can be specialised to any fixed ultimately
//! periodic trace of the system, which yields a computable witness that ignores
//! it. The transducers produced later do exactly that.

use serde::{Deserialize, Serialize};

use super::ast::{HyperFormula, Quantifier};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuantBlock {
    pub quantifier: Quantifier,
    pub vars: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlternationForm {
    pub blocks: Vec<QuantBlock>,
    pub dummies: Vec<String>,
}

impl AlternationForm {
    pub fn k(&self) -> usize {
        self.blocks.len()
    }

    /// Variables in prefix order, dummies included.
    pub fn variables(&self) -> Vec<String> {
        self.blocks.iter().flat_map(|b| b.vars.iter().cloned()).collect()
    }

    pub fn arities(&self) -> Vec<usize> {
        self.blocks.iter().map(|b| b.vars.len()).collect()
    }

    pub fn is_dummy(&self, var: &str) -> bool {
        self.dummies.iter().any(|d| d == var)
    }

    /// Index of the block binding `var`.
    pub fn block_of(&self, var: &str) -> Option<usize> {
        self.blocks.iter().position(|b| b.vars.iter().any(|v| v == var))
    }

    /// Offset of the first variable of block `i` in [`Self::variables`].
    pub fn offset(&self, i: usize) -> usize {
        self.blocks[..i].iter().map(|b| b.vars.len()).sum()
    }

    pub fn total_vars(&self) -> usize {
        self.blocks.iter().map(|b| b.vars.len()).sum()
    }
}

pub fn normalize_prefix(f: &HyperFormula) -> AlternationForm {
    let mut blocks: Vec<QuantBlock> = Vec::new();
    for b in &f.prefix {
        match blocks.last_mut() {
            Some(last) if last.quantifier == b.quantifier => last.vars.push(b.var.clone()),
            _ => blocks.push(QuantBlock { quantifier: b.quantifier, vars: vec![b.var.clone()] }),
        }
    }
    let taken: Vec<String> = f.variables();
    let mut dummies = Vec::new();
    let fresh = |hint: usize, dummies: &mut Vec<String>| {
        let mut name = format!("d{hint}");
        while taken.contains(&name) || dummies.contains(&name) {
            name.push('_');
        }
        dummies.push(name.clone());
        name
    };
    if blocks.first().map(|b| b.quantifier) != Some(Quantifier::Forall) {
        let v = fresh(0, &mut dummies);
        blocks.insert(0, QuantBlock { quantifier: Quantifier::Forall, vars: vec![v] });
    }
    if blocks.last().map(|b| b.quantifier) != Some(Quantifier::Exists) {
        let v = fresh(blocks.len(), &mut dummies);
        blocks.push(QuantBlock { quantifier: Quantifier::Exists, vars: vec![v] });
    }
    AlternationForm { blocks, dummies }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_formula;

    fn vars(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn merges_existential_run() {
        let f = parse_formula("forall p. exists p1. exists p2. G (a[p] <-> (a[p1] xor a[p2]))").unwrap();
        let n = normalize_prefix(&f);
        assert_eq!(n.k(), 2);
        assert_eq!(n.blocks[1].vars, vars(&["p1", "p2"]));
        assert!(n.dummies.is_empty());
    }

    #[test]
    fn pads_leading_existential() {
        let f = parse_formula("exists p. forall q. exists r. (X a[p]) -> ((F a[q]) <-> (X a[r]))").unwrap();
        let n = normalize_prefix(&f);
        assert_eq!(n.k(), 4);
        assert_eq!(n.blocks[0], QuantBlock { quantifier: Quantifier::Forall, vars: vars(&["d0"]) });
        assert_eq!(n.dummies, vars(&["d0"]));
        assert_eq!(n.variables(), vars(&["d0", "p", "q", "r"]));
    }

    #[test]
    fn pads_trailing_universal() {
        let f = parse_formula("forall p, q. G (i[p] <-> i[q]) -> G (o[p] <-> o[q])").unwrap();
        let n = normalize_prefix(&f);
        assert_eq!(n.k(), 2);
        assert_eq!(n.blocks[1], QuantBlock { quantifier: Quantifier::Exists, vars: vars(&["d1"]) });
    }

    #[test]
    fn fresh_names_avoid_clashes() {
        let f = parse_formula("exists d0. a[d0]").unwrap();
        let n = normalize_prefix(&f);
        assert_eq!(n.blocks[0].vars, vars(&["d0_"]));
    }

    #[test]
    fn quantifier_free_sentence() {
        let f = parse_formula("true").unwrap();
        let n = normalize_prefix(&f);
        assert_eq!(n.k(), 2);
        assert_eq!(n.dummies.len(), 2);
    }
}
