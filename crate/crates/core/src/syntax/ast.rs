use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Quantifier {
    Forall,
    Exists,
}

impl Quantifier {
    pub fn dual(self) -> Self {
        match self {
            Quantifier::Forall => Quantifier::Exists,
            Quantifier::Exists => Quantifier::Forall,
        }
    }

    pub fn keyword(self) -> &'static str {
        match self {
            Quantifier::Forall => "forall",
            Quantifier::Exists => "exists",
        }
    }
}

/// Quantifier-free matrix. `F`, `G`, `->`, `<->` and `xor` are kept as written so
/// printing round-trips; [`Ltl::expand`] rewrites them into the core connectives.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Ltl {
    True,
    False,
    Atom { prop: String, var: String },
    Not(Box<Ltl>),
    And(Box<Ltl>, Box<Ltl>),
    Or(Box<Ltl>, Box<Ltl>),
    Xor(Box<Ltl>, Box<Ltl>),
    Implies(Box<Ltl>, Box<Ltl>),
    Iff(Box<Ltl>, Box<Ltl>),
    Next(Box<Ltl>),
    Until(Box<Ltl>, Box<Ltl>),
    Finally(Box<Ltl>),
    Globally(Box<Ltl>),
}

impl Ltl {
    pub fn atom(prop: &str, var: &str) -> Ltl {
        Ltl::Atom { prop: prop.to_string(), var: var.to_string() }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(self) -> Ltl {
        Ltl::Not(Box::new(self))
    }

    pub fn and(self, rhs: Ltl) -> Ltl {
        Ltl::And(Box::new(self), Box::new(rhs))
    }

    pub fn or(self, rhs: Ltl) -> Ltl {
        Ltl::Or(Box::new(self), Box::new(rhs))
    }

    pub fn iff(self, rhs: Ltl) -> Ltl {
        Ltl::Iff(Box::new(self), Box::new(rhs))
    }

    pub fn implies(self, rhs: Ltl) -> Ltl {
        Ltl::Implies(Box::new(self), Box::new(rhs))
    }

    pub fn next(self) -> Ltl {
        Ltl::Next(Box::new(self))
    }

    pub fn until(self, rhs: Ltl) -> Ltl {
        Ltl::Until(Box::new(self), Box::new(rhs))
    }

    pub fn finally(self) -> Ltl {
        Ltl::Finally(Box::new(self))
    }

    pub fn globally(self) -> Ltl {
        Ltl::Globally(Box::new(self))
    }

    /// Number of syntax-tree nodes.
    pub fn size(&self) -> usize {
        1 + self.children().iter().map(|c| c.size()).sum::<usize>()
    }

    pub fn children(&self) -> Vec<&Ltl> {
        match self {
            Ltl::True | Ltl::False | Ltl::Atom { .. } => vec![],
            Ltl::Not(a) | Ltl::Next(a) | Ltl::Finally(a) | Ltl::Globally(a) => vec![a],
            Ltl::And(a, b)
            | Ltl::Or(a, b)
            | Ltl::Xor(a, b)
            | Ltl::Implies(a, b)
            | Ltl::Iff(a, b)
            | Ltl::Until(a, b) => vec![a, b],
        }
    }

    pub fn variables(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<String>) {
        if let Ltl::Atom { var, .. } = self {
            out.insert(var.clone());
        }
        for c in self.children() {
            c.collect_vars(out);
        }
    }

    pub fn propositions(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_props(&mut out);
        out
    }

    fn collect_props(&self, out: &mut BTreeSet<String>) {
        if let Ltl::Atom { prop, .. } = self {
            out.insert(prop.clone());
        }
        for c in self.children() {
            c.collect_props(out);
        }
    }

    /// Rewrites derived connectives into `!`, `&&`, `||`, `X`, `U`.
    /// `F a` becomes `true U a` (same language as `!a U a`) and `G a` becomes `!F !a`.
    pub fn expand(&self) -> Ltl {
        match self {
            Ltl::True | Ltl::False | Ltl::Atom { .. } => self.clone(),
            Ltl::Not(a) => a.expand().not(),
            Ltl::And(a, b) => a.expand().and(b.expand()),
            Ltl::Or(a, b) => a.expand().or(b.expand()),
            Ltl::Xor(a, b) => {
                let (a, b) = (a.expand(), b.expand());
                a.clone().and(b.clone().not()).or(a.not().and(b))
            }
            Ltl::Implies(a, b) => a.expand().not().or(b.expand()),
            Ltl::Iff(a, b) => {
                let (a, b) = (a.expand(), b.expand());
                a.clone().and(b.clone()).or(a.not().and(b.not()))
            }
            Ltl::Next(a) => a.expand().next(),
            Ltl::Until(a, b) => a.expand().until(b.expand()),
            Ltl::Finally(a) => Ltl::True.until(a.expand()),
            Ltl::Globally(a) => Ltl::True.until(a.expand().not()).not(),
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Ltl::Iff(..) => 1,
            Ltl::Implies(..) => 2,
            Ltl::Xor(..) => 3,
            Ltl::Or(..) => 4,
            Ltl::And(..) => 5,
            Ltl::Until(..) => 6,
            Ltl::Not(..) | Ltl::Next(..) | Ltl::Finally(..) | Ltl::Globally(..) => 7,
            Ltl::True | Ltl::False | Ltl::Atom { .. } => 8,
        }
    }
}

impl fmt::Display for Ltl {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // binary operands are parenthesized unless they bind strictly tighter
        let operand = |f: &mut fmt::Formatter<'_>, child: &Ltl, parent: u8| {
            if child.precedence() > parent {
                write!(f, "{child}")
            } else {
                write!(f, "({child})")
            }
        };
        let binary = |f: &mut fmt::Formatter<'_>, a: &Ltl, op: &str, b: &Ltl| {
            let p = self.precedence();
            operand(f, a, p)?;
            write!(f, " {op} ")?;
            operand(f, b, p)
        };
        match self {
            Ltl::True => write!(f, "true"),
            Ltl::False => write!(f, "false"),
            Ltl::Atom { prop, var } => write!(f, "{prop}[{var}]"),
            Ltl::Not(a) => {
                write!(f, "!")?;
                operand(f, a, 6)
            }
            Ltl::Next(a) => {
                write!(f, "X ")?;
                operand(f, a, 6)
            }
            Ltl::Finally(a) => {
                write!(f, "F ")?;
                operand(f, a, 6)
            }
            Ltl::Globally(a) => {
                write!(f, "G ")?;
                operand(f, a, 6)
            }
            Ltl::And(a, b) => binary(f, a, "&&", b),
            Ltl::Or(a, b) => binary(f, a, "||", b),
            Ltl::Xor(a, b) => binary(f, a, "xor", b),
            Ltl::Implies(a, b) => binary(f, a, "->", b),
            Ltl::Iff(a, b) => binary(f, a, "<->", b),
            Ltl::Until(a, b) => binary(f, a, "U", b),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Binding {
    pub quantifier: Quantifier,
    pub var: String,
}

/// A prenex HyperLTL sentence.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct HyperFormula {
    pub prefix: Vec<Binding>,
    pub matrix: Ltl,
}

impl HyperFormula {
    pub fn variables(&self) -> Vec<String> {
        self.prefix.iter().map(|b| b.var.clone()).collect()
    }

    pub fn quantifier_of(&self, var: &str) -> Option<Quantifier> {
        self.prefix.iter().find(|b| b.var == var).map(|b| b.quantifier)
    }

    /// Prenex negation: every quantifier is dualized and the matrix negated.
    pub fn negate(&self) -> HyperFormula {
        HyperFormula {
            prefix: self
                .prefix
                .iter()
                .map(|b| Binding { quantifier: b.quantifier.dual(), var: b.var.clone() })
                .collect(),
            matrix: self.matrix.clone().not(),
        }
    }
}

impl fmt::Display for HyperFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut i = 0;
        while i < self.prefix.len() {
            let q = self.prefix[i].quantifier;
            let mut j = i;
            let mut vars = Vec::new();
            while j < self.prefix.len() && self.prefix[j].quantifier == q {
                vars.push(self.prefix[j].var.as_str());
                j += 1;
            }
            write!(f, "{} {}. ", q.keyword(), vars.join(", "))?;
            i = j;
        }
        write!(f, "{}", self.matrix)
    }
}
