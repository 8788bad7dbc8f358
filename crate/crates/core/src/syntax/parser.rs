//! Recursive-descent parser for `.hltl` sentences.
//!
//! ```text
//! formula := quant* ltl
//! quant   := ("forall" | "exists") ident ("," ident)* "."
//! ltl     := iff
//! iff     := imp ("<->" imp)*
//! imp     := xor ("->" imp)?
//! xor     := or ("xor" or)*
//! or      := and ("||" and)*
//! and     := until ("&&" until)*
//! until   := unary ("U" until)?
//! unary   := ("!" | "X" | "F" | "G") unary | primary
//! primary := "true" | "false" | ident "[" ident "]" | "(" ltl ")"
//! ```
//!
//! `#` starts a comment running to the end of the line.

use std::collections::HashSet;

use super::ast::{Binding, HyperFormula, Ltl, Quantifier};
use crate::error::{Error, Pos, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    LBracket,
    RBracket,
    LParen,
    RParen,
    Comma,
    Dot,
    Bang,
    AndAnd,
    OrOr,
    Arrow,
    DoubleArrow,
    Eof,
}

struct Lexer<'a> {
    src: &'a str,
    bytes: &'a [u8],
    at: usize,
    line: usize,
    line_start: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer { src, bytes: src.as_bytes(), at: 0, line: 1, line_start: 0 }
    }

    fn pos(&self) -> Pos {
        Pos { offset: self.at, line: self.line, column: self.at - self.line_start + 1 }
    }

    fn skip_trivia(&mut self) {
        while self.at < self.bytes.len() {
            match self.bytes[self.at] {
                b'\n' => {
                    self.at += 1;
                    self.line += 1;
                    self.line_start = self.at;
                }
                b' ' | b'\t' | b'\r' => self.at += 1,
                b'#' => {
                    while self.at < self.bytes.len() && self.bytes[self.at] != b'\n' {
                        self.at += 1;
                    }
                }
                _ => break,
            }
        }
    }

    fn next(&mut self) -> Result<(Tok, Pos)> {
        self.skip_trivia();
        let pos = self.pos();
        let Some(&c) = self.bytes.get(self.at) else {
            return Ok((Tok::Eof, pos));
        };
        let rest = &self.src[self.at..];
        let (tok, len) = if rest.starts_with("<->") {
            (Tok::DoubleArrow, 3)
        } else if rest.starts_with("->") {
            (Tok::Arrow, 2)
        } else if rest.starts_with("&&") {
            (Tok::AndAnd, 2)
        } else if rest.starts_with("||") {
            (Tok::OrOr, 2)
        } else {
            match c {
                b'[' => (Tok::LBracket, 1),
                b']' => (Tok::RBracket, 1),
                b'(' => (Tok::LParen, 1),
                b')' => (Tok::RParen, 1),
                b',' => (Tok::Comma, 1),
                b'.' => (Tok::Dot, 1),
                b'!' => (Tok::Bang, 1),
                c if c.is_ascii_alphabetic() || c == b'_' => {
                    let len = rest
                        .bytes()
                        .take_while(|b| b.is_ascii_alphanumeric() || *b == b'_')
                        .count();
                    (Tok::Ident(rest[..len].to_string()), len)
                }
                _ => {
                    let ch = rest.chars().next().unwrap_or('?');
                    return Err(Error::Syntax { pos, message: format!("unexpected character `{ch}`") });
                }
            }
        };
        self.at += len;
        Ok((tok, pos))
    }
}

struct Parser<'a> {
    toks: Vec<(Tok, Pos)>,
    at: usize,
    bound: HashSet<String>,
    _src: &'a str,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn peek2(&self) -> &Tok {
        &self.toks[(self.at + 1).min(self.toks.len() - 1)].0
    }

    fn pos(&self) -> Pos {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> (Tok, Pos) {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<Pos> {
        let (tok, pos) = self.bump();
        if tok == want {
            Ok(pos)
        } else {
            Err(Error::Syntax { pos, message: format!("expected {what}, found {}", describe(&tok)) })
        }
    }

    fn ident(&mut self) -> Result<(String, Pos)> {
        match self.bump() {
            (Tok::Ident(s), pos) => Ok((s, pos)),
            (tok, pos) => Err(Error::Syntax { pos, message: format!("expected identifier, found {}", describe(&tok)) }),
        }
    }

    fn is_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw) && *self.peek2() != Tok::LBracket
    }

    fn formula(&mut self) -> Result<HyperFormula> {
        let mut prefix = Vec::new();
        loop {
            let q = if self.is_keyword("forall") {
                Quantifier::Forall
            } else if self.is_keyword("exists") {
                Quantifier::Exists
            } else {
                break;
            };
            self.bump();
            loop {
                let (var, pos) = self.ident()?;
                if !self.bound.insert(var.clone()) {
                    return Err(Error::DuplicateBinding { var, pos });
                }
                prefix.push(Binding { quantifier: q, var });
                if *self.peek() == Tok::Comma {
                    self.bump();
                } else {
                    break;
                }
            }
            self.expect(Tok::Dot, "`.` after quantified variables")?;
        }
        let matrix = self.iff()?;
        if *self.peek() != Tok::Eof {
            let (tok, pos) = self.bump();
            return Err(Error::Syntax { pos, message: format!("unexpected {} after formula", describe(&tok)) });
        }
        Ok(HyperFormula { prefix, matrix })
    }

    fn iff(&mut self) -> Result<Ltl> {
        let mut lhs = self.imp()?;
        while *self.peek() == Tok::DoubleArrow {
            self.bump();
            lhs = lhs.iff(self.imp()?);
        }
        Ok(lhs)
    }

    fn imp(&mut self) -> Result<Ltl> {
        let lhs = self.xor()?;
        if *self.peek() == Tok::Arrow {
            self.bump();
            return Ok(lhs.implies(self.imp()?));
        }
        Ok(lhs)
    }

    fn xor(&mut self) -> Result<Ltl> {
        let mut lhs = self.or()?;
        while self.is_keyword("xor") {
            self.bump();
            lhs = Ltl::Xor(Box::new(lhs), Box::new(self.or()?));
        }
        Ok(lhs)
    }

    fn or(&mut self) -> Result<Ltl> {
        let mut lhs = self.and()?;
        while *self.peek() == Tok::OrOr {
            self.bump();
            lhs = lhs.or(self.and()?);
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<Ltl> {
        let mut lhs = self.until()?;
        while *self.peek() == Tok::AndAnd {
            self.bump();
            lhs = lhs.and(self.until()?);
        }
        Ok(lhs)
    }

    fn until(&mut self) -> Result<Ltl> {
        let lhs = self.unary()?;
        if self.is_keyword("U") {
            self.bump();
            return Ok(lhs.until(self.until()?));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Ltl> {
        if *self.peek() == Tok::Bang {
            self.bump();
            return Ok(self.unary()?.not());
        }
        for (kw, build) in [("X", Ltl::next as fn(Ltl) -> Ltl), ("F", Ltl::finally), ("G", Ltl::globally)] {
            if self.is_keyword(kw) {
                self.bump();
                return Ok(build(self.unary()?));
            }
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<Ltl> {
        if self.is_keyword("forall") || self.is_keyword("exists") {
            return Err(Error::Syntax {
                pos: self.pos(),
                message: "quantifier inside the matrix: only prenex sentences are supported".into(),
            });
        }
        match self.bump() {
            (Tok::LParen, _) => {
                let inner = self.iff()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(inner)
            }
            (Tok::Ident(s), _) if s == "true" && *self.peek() != Tok::LBracket => Ok(Ltl::True),
            (Tok::Ident(s), _) if s == "false" && *self.peek() != Tok::LBracket => Ok(Ltl::False),
            (Tok::Ident(prop), _) => {
                self.expect(Tok::LBracket, "`[` after proposition")?;
                let (var, pos) = self.ident()?;
                self.expect(Tok::RBracket, "`]`")?;
                if !self.bound.contains(&var) {
                    return Err(Error::UnboundVariable { var, pos });
                }
                Ok(Ltl::Atom { prop, var })
            }
            (tok, pos) => Err(Error::Syntax { pos, message: format!("expected formula, found {}", describe(&tok)) }),
        }
    }
}

fn describe(tok: &Tok) -> String {
    match tok {
        Tok::Ident(s) => format!("`{s}`"),
        Tok::LBracket => "`[`".into(),
        Tok::RBracket => "`]`".into(),
        Tok::LParen => "`(`".into(),
        Tok::RParen => "`)`".into(),
        Tok::Comma => "`,`".into(),
        Tok::Dot => "`.`".into(),
        Tok::Bang => "`!`".into(),
        Tok::AndAnd => "`&&`".into(),
        Tok::OrOr => "`||`".into(),
        Tok::Arrow => "`->`".into(),
        Tok::DoubleArrow => "`<->`".into(),
        Tok::Eof => "end of input".into(),
    }
}

/// Parses a prenex HyperLTL sentence.
pub fn parse_formula(text: &str) -> Result<HyperFormula> {
    let mut lexer = Lexer::new(text);
    let mut toks = Vec::new();
    loop {
        let (tok, pos) = lexer.next()?;
        let eof = tok == Tok::Eof;
        toks.push((tok, pos));
        if eof {
            break;
        }
    }
    let mut parser = Parser { toks, at: 0, bound: HashSet::new(), _src: text };
    parser.formula()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_identity_formula() {
        let f = parse_formula("forall p. exists q. G (a[p] <-> a[q])").unwrap();
        assert_eq!(f.prefix.len(), 2);
        assert_eq!(f.prefix[0], Binding { quantifier: Quantifier::Forall, var: "p".into() });
        assert_eq!(f.prefix[1], Binding { quantifier: Quantifier::Exists, var: "q".into() });
        assert_eq!(f.matrix, Ltl::atom("a", "p").iff(Ltl::atom("a", "q")).globally());
    }

    #[test]
    fn parses_no_computable_witness_sentence() {
        let f = parse_formula("forall p. exists q. (F a[p]) <-> (X a[q])").unwrap();
        assert_eq!(f.matrix, Ltl::atom("a", "p").finally().iff(Ltl::atom("a", "q").next()));
    }

    #[test]
    fn unbound_variable_is_reported() {
        match parse_formula("exists q. a[p]") {
            Err(Error::UnboundVariable { var, pos }) => {
                assert_eq!(var, "p");
                assert_eq!(pos.column, 13);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn duplicate_binding_is_reported() {
        assert!(matches!(
            parse_formula("forall p. exists p. a[p]"),
            Err(Error::DuplicateBinding { .. })
        ));
    }

    #[test]
    fn non_prenex_is_rejected() {
        let err = parse_formula("forall p. G exists q. a[q]").unwrap_err();
        assert!(matches!(err, Error::Syntax { .. }), "{err}");
    }

    #[test]
    fn syntax_error_has_position() {
        match parse_formula("forall p.\n  a[p] &&") {
            Err(Error::Syntax { pos, .. }) => assert_eq!(pos.line, 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn keywords_usable_as_propositions() {
        let f = parse_formula("forall p. X[p] U F[p]").unwrap();
        assert_eq!(f.matrix, Ltl::atom("X", "p").until(Ltl::atom("F", "p")));
    }

    #[test]
    fn precedence_and_associativity() {
        let f = parse_formula("forall p. a[p] && b[p] || c[p] -> d[p] -> e[p]").unwrap();
        let (a, b, c, d, e) = (
            Ltl::atom("a", "p"),
            Ltl::atom("b", "p"),
            Ltl::atom("c", "p"),
            Ltl::atom("d", "p"),
            Ltl::atom("e", "p"),
        );
        assert_eq!(f.matrix, a.and(b).or(c).implies(d.implies(e)));
    }

    #[test]
    fn comments_are_skipped() {
        let f = parse_formula("# header\nforall p. # trailing\n a[p]").unwrap();
        assert_eq!(f.matrix, Ltl::atom("a", "p"));
    }
}
