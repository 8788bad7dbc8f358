//! HyperLTL sentences: syntax tree, parser and alternation normal form.

mod ast;
mod normalize;
mod parser;

pub use ast::{Binding, HyperFormula, Ltl, Quantifier};
pub use normalize::{normalize_prefix, AlternationForm, QuantBlock};
pub use parser::parse_formula;

/// Prenex negation, see [`HyperFormula::negate`].
pub fn negate(f: &HyperFormula) -> HyperFormula {
    f.negate()
}
