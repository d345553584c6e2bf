//! A small closed-form predicate language over M-set elements: word
//! (in)equality, concatenation, generator-power patterns with one shared
//! integer variable `n`, morphism application, and pair projections.
//!
//! Example bodies:
//! `(fst matches x^(n+1)) and (snd matches a^n)` and `phi(fst) != a * snd`.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use thiserror::Error;

use crate::monoid::{MonoidMorphism, MonoidPresentation};
use crate::mset::{Elem, MSet};
use crate::rewriting::Word;

/// A named predicate declared against an M-set carrier.
#[derive(Clone, Debug)]
pub struct Predicate {
    pub name: String,
    pub mset: String,
    pub text: String,
    expr: PredExpr,
}

/// Named morphisms visible to predicate bodies.
#[derive(Clone, Debug, Default)]
pub struct PredicateContext {
    pub morphisms: BTreeMap<String, Arc<MonoidMorphism>>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PredicateError {
    #[error("predicate syntax error at offset {offset}: {msg}")]
    Syntax { offset: usize, msg: String },
    #[error("unknown morphism `{0}` in predicate")]
    UnknownMorphism(String),
    #[error("`{0}` applied to an element that is not a pair")]
    NotAPair(String),
    #[error("term evaluated on a non-word element")]
    NotAWord,
    #[error("symbol `{0}` is not a generator of the morphism source")]
    NotASourceGenerator(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum PredExpr {
    True,
    And(Vec<PredExpr>),
    Matches(TermExpr, Pattern),
    Cmp(TermExpr, CmpOp, TermExpr),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum CmpOp {
    Eq,
    Neq,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum TermExpr {
    Fst,
    Snd,
    SelfElem,
    Morph(String, Box<TermExpr>),
    Concat(Box<TermExpr>, Box<TermExpr>),
    Lit(Word),
}

/// A sequence of generator powers, e.g. `e x^(n+1)` or `a^n` or `x x`.
/// At most one shared variable `n` ranges over {0, 1, 2, ...}.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Pattern {
    items: Vec<(String, Exp)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Exp {
    Const(usize),
    /// `n + k`
    VarPlus(usize),
}

impl Pattern {
    fn has_var(&self) -> bool {
        self.items.iter().any(|(_, e)| matches!(e, Exp::VarPlus(_)))
    }

    fn expand(&self, n: usize) -> Word {
        let mut syms = Vec::new();
        for (g, e) in &self.items {
            let count = match e {
                Exp::Const(k) => *k,
                Exp::VarPlus(k) => n + k,
            };
            for _ in 0..count {
                syms.push(g.clone());
            }
        }
        Word::from_syms(syms)
    }
}

/// Truth of a conjunction: there must exist a single n >= 0 satisfying all
/// atoms. `Any` means the atom holds for every n.
#[derive(Clone, Debug)]
enum Bindings {
    Any,
    Set(BTreeSet<usize>),
}

impl Bindings {
    fn falsum() -> Self {
        Bindings::Set(BTreeSet::new())
    }

    fn from_bool(b: bool) -> Self {
        if b { Bindings::Any } else { Bindings::falsum() }
    }

    fn meet(self, other: Bindings) -> Bindings {
        match (self, other) {
            (Bindings::Any, o) => o,
            (s, Bindings::Any) => s,
            (Bindings::Set(a), Bindings::Set(b)) => {
                Bindings::Set(a.intersection(&b).copied().collect())
            }
        }
    }

    fn truthy(&self) -> bool {
        match self {
            Bindings::Any => true,
            Bindings::Set(s) => !s.is_empty(),
        }
    }
}

impl Predicate {
    /// Parses a predicate body, e.g. `(fst matches x^(n+1)) and (snd matches a^n)`.
    pub fn parse(
        name: impl Into<String>,
        mset: impl Into<String>,
        body: &str,
    ) -> Result<Predicate, PredicateError> {
        let tokens = tokenize(body)?;
        let mut p = Parser { tokens, pos: 0 };
        let expr = p.expr()?;
        if p.pos != p.tokens.len() {
            return Err(p.err("trailing input after predicate"));
        }
        Ok(Predicate {
            name: name.into(),
            mset: mset.into(),
            text: body.trim().to_owned(),
            expr,
        })
    }

    /// Evaluates the predicate on a carrier element. Total on every carrier
    /// element of the M-set it is declared against.
    pub fn eval(&self, elem: &Elem, mset: &MSet, ctx: &PredicateContext) -> Result<bool, PredicateError> {
        Ok(eval_expr(&self.expr, elem, mset, ctx)?.truthy())
    }
}

fn eval_expr(
    expr: &PredExpr,
    elem: &Elem,
    mset: &MSet,
    ctx: &PredicateContext,
) -> Result<Bindings, PredicateError> {
    match expr {
        PredExpr::True => Ok(Bindings::Any),
        PredExpr::And(parts) => {
            let mut acc = Bindings::Any;
            for p in parts {
                acc = acc.meet(eval_expr(p, elem, mset, ctx)?);
                if !acc.truthy() {
                    return Ok(acc);
                }
            }
            Ok(acc)
        }
        PredExpr::Cmp(l, op, r) => {
            let (lw, lp) = eval_term(l, elem, mset, ctx)?;
            let (rw, rp) = eval_term(r, elem, mset, ctx)?;
            let lw = normalize_in(&lw, lp.as_ref().or(rp.as_ref()));
            let rw = normalize_in(&rw, rp.as_ref().or(lp.as_ref()));
            let eq = lw == rw;
            Ok(Bindings::from_bool(match op {
                CmpOp::Eq => eq,
                CmpOp::Neq => !eq,
            }))
        }
        PredExpr::Matches(t, pat) => {
            let (w, home) = eval_term(t, elem, mset, ctx)?;
            let w = normalize_in(&w, home.as_ref());
            if !pat.has_var() {
                return Ok(Bindings::from_bool(pat.expand(0) == w));
            }
            // expansion length is strictly increasing in n, so n <= |w|
            let hits: BTreeSet<usize> = (0..=w.len()).filter(|&n| pat.expand(n) == w).collect();
            Ok(Bindings::Set(hits))
        }
    }
}

fn normalize_in(w: &Word, p: Option<&Arc<MonoidPresentation>>) -> Word {
    match p {
        Some(p) => p.normalize(w),
        None => w.clone(),
    }
}

type TermValue = (Word, Option<Arc<MonoidPresentation>>);

fn eval_term(
    term: &TermExpr,
    elem: &Elem,
    mset: &MSet,
    ctx: &PredicateContext,
) -> Result<TermValue, PredicateError> {
    match term {
        TermExpr::SelfElem => {
            let w = elem.as_word().ok_or(PredicateError::NotAWord)?;
            Ok((w.clone(), mset.word_presentation()))
        }
        TermExpr::Fst | TermExpr::Snd => {
            let label = if matches!(term, TermExpr::Fst) { "fst" } else { "snd" };
            let (components, sets) = match (elem, mset.component_msets()) {
                (Elem::Pair(a, b), Some((x, y))) => ((a, b), (x, y)),
                _ => return Err(PredicateError::NotAPair(label.to_owned())),
            };
            let (chosen, home) = if matches!(term, TermExpr::Fst) {
                (components.0, sets.0)
            } else {
                (components.1, sets.1)
            };
            let w = chosen.as_word().ok_or(PredicateError::NotAWord)?;
            Ok((w.clone(), home.word_presentation()))
        }
        TermExpr::Morph(name, inner) => {
            let m = ctx
                .morphisms
                .get(name)
                .ok_or_else(|| PredicateError::UnknownMorphism(name.clone()))?;
            let (w, _) = eval_term(inner, elem, mset, ctx)?;
            for sym in w.syms() {
                if !m.images.contains_key(sym) {
                    return Err(PredicateError::NotASourceGenerator(sym.clone()));
                }
            }
            Ok((m.apply(&w), Some(m.target.clone())))
        }
        TermExpr::Concat(l, r) => {
            let (lw, lp) = eval_term(l, elem, mset, ctx)?;
            let (rw, rp) = eval_term(r, elem, mset, ctx)?;
            Ok((lw.concat(&rw), lp.or(rp)))
        }
        TermExpr::Lit(w) => Ok((w.clone(), None)),
    }
}

// ---- parsing ----

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Num(usize),
    LParen,
    RParen,
    Caret,
    Plus,
    Star,
    Eq,
    Neq,
}

fn tokenize(s: &str) -> Result<Vec<(usize, Tok)>, PredicateError> {
    let mut out = Vec::new();
    let bytes: Vec<char> = s.chars().collect();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        match c {
            c if c.is_whitespace() => i += 1,
            '(' => {
                out.push((i, Tok::LParen));
                i += 1;
            }
            ')' => {
                out.push((i, Tok::RParen));
                i += 1;
            }
            '^' => {
                out.push((i, Tok::Caret));
                i += 1;
            }
            '+' => {
                out.push((i, Tok::Plus));
                i += 1;
            }
            '*' => {
                out.push((i, Tok::Star));
                i += 1;
            }
            '=' => {
                out.push((i, Tok::Eq));
                i += 1;
            }
            '!' => {
                if bytes.get(i + 1) == Some(&'=') {
                    out.push((i, Tok::Neq));
                    i += 2;
                } else {
                    return Err(PredicateError::Syntax {
                        offset: i,
                        msg: "expected `=` after `!`".to_owned(),
                    });
                }
            }
            c if c.is_ascii_digit() => {
                let start = i;
                let mut n = 0usize;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    n = n * 10 + bytes[i].to_digit(10).unwrap() as usize;
                    i += 1;
                }
                out.push((start, Tok::Num(n)));
            }
            c if c.is_alphanumeric() || c == '_' => {
                let start = i;
                let mut ident = String::new();
                while i < bytes.len() && (bytes[i].is_alphanumeric() || bytes[i] == '_') {
                    ident.push(bytes[i]);
                    i += 1;
                }
                out.push((start, Tok::Ident(ident)));
            }
            other => {
                return Err(PredicateError::Syntax {
                    offset: i,
                    msg: format!("unexpected character `{other}`"),
                });
            }
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<(usize, Tok)>,
    pos: usize,
}

impl Parser {
    fn err(&self, msg: impl Into<String>) -> PredicateError {
        let offset = self.tokens.get(self.pos).map_or(usize::MAX, |(o, _)| *o);
        PredicateError::Syntax {
            offset,
            msg: msg.into(),
        }
    }

    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos).map(|(_, t)| t)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.tokens.get(self.pos).map(|(_, t)| t.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, tok: Tok) -> Result<(), PredicateError> {
        if self.peek() == Some(&tok) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(format!("expected {tok:?}")))
        }
    }

    fn at_ident(&self, kw: &str) -> bool {
        matches!(self.peek(), Some(Tok::Ident(s)) if s == kw)
    }

    fn expr(&mut self) -> Result<PredExpr, PredicateError> {
        let mut parts = vec![self.atom()?];
        while self.at_ident("and") {
            self.pos += 1;
            parts.push(self.atom()?);
        }
        if parts.len() == 1 {
            Ok(parts.pop().unwrap())
        } else {
            Ok(PredExpr::And(parts))
        }
    }

    fn atom(&mut self) -> Result<PredExpr, PredicateError> {
        if self.peek() == Some(&Tok::LParen) {
            self.pos += 1;
            let inner = self.expr()?;
            self.expect(Tok::RParen)?;
            return Ok(inner);
        }
        if self.at_ident("true") {
            self.pos += 1;
            return Ok(PredExpr::True);
        }
        let lhs = self.term()?;
        match self.peek() {
            Some(Tok::Ident(s)) if s == "matches" => {
                self.pos += 1;
                let pat = self.pattern()?;
                Ok(PredExpr::Matches(lhs, pat))
            }
            Some(Tok::Eq) => {
                self.pos += 1;
                let rhs = self.term()?;
                Ok(PredExpr::Cmp(lhs, CmpOp::Eq, rhs))
            }
            Some(Tok::Neq) => {
                self.pos += 1;
                let rhs = self.term()?;
                Ok(PredExpr::Cmp(lhs, CmpOp::Neq, rhs))
            }
            _ => Err(self.err("expected `matches`, `=` or `!=`")),
        }
    }

    fn term(&mut self) -> Result<TermExpr, PredicateError> {
        let mut t = self.factor()?;
        while self.peek() == Some(&Tok::Star) {
            self.pos += 1;
            let rhs = self.factor()?;
            t = TermExpr::Concat(Box::new(t), Box::new(rhs));
        }
        Ok(t)
    }

    fn factor(&mut self) -> Result<TermExpr, PredicateError> {
        match self.next() {
            Some(Tok::Ident(s)) if s == "fst" => Ok(TermExpr::Fst),
            Some(Tok::Ident(s)) if s == "snd" => Ok(TermExpr::Snd),
            Some(Tok::Ident(s)) if s == "self" => Ok(TermExpr::SelfElem),
            Some(Tok::Ident(s)) => {
                if self.peek() == Some(&Tok::LParen) {
                    self.pos += 1;
                    let inner = self.term()?;
                    self.expect(Tok::RParen)?;
                    Ok(TermExpr::Morph(s, Box::new(inner)))
                } else {
                    Ok(TermExpr::Lit(Word::single(s)))
                }
            }
            Some(Tok::Num(1)) => Ok(TermExpr::Lit(Word::empty())),
            _ => {
                self.pos = self.pos.saturating_sub(1);
                Err(self.err("expected a term"))
            }
        }
    }

    fn pattern(&mut self) -> Result<Pattern, PredicateError> {
        let mut items = Vec::new();
        loop {
            match self.peek() {
                Some(Tok::Ident(s)) if s != "and" && s != "matches" => {
                    let gen = s.clone();
                    self.pos += 1;
                    let exp = if self.peek() == Some(&Tok::Caret) {
                        self.pos += 1;
                        self.exponent()?
                    } else {
                        Exp::Const(1)
                    };
                    items.push((gen, exp));
                }
                _ => break,
            }
        }
        if items.is_empty() {
            return Err(self.err("expected a pattern"));
        }
        Ok(Pattern { items })
    }

    fn exponent(&mut self) -> Result<Exp, PredicateError> {
        match self.next() {
            Some(Tok::Num(k)) => Ok(Exp::Const(k)),
            Some(Tok::Ident(s)) if s == "n" => Ok(Exp::VarPlus(0)),
            Some(Tok::LParen) => {
                match self.next() {
                    Some(Tok::Ident(s)) if s == "n" => {}
                    _ => return Err(self.err("expected `n` in exponent")),
                }
                self.expect(Tok::Plus)?;
                let k = match self.next() {
                    Some(Tok::Num(k)) => k,
                    _ => return Err(self.err("expected a number after `n +`")),
                };
                self.expect(Tok::RParen)?;
                Ok(Exp::VarPlus(k))
            }
            _ => Err(self.err("expected an exponent")),
        }
    }
}

/// Shorthand used by unit tests elsewhere in the crate.
#[cfg(test)]
pub(crate) fn parse_predicate_for_tests(name: &str, mset: &str, body: &str) -> Predicate {
    Predicate::parse(name, mset, body).unwrap()
}
