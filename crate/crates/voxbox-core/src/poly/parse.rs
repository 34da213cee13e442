//! Recursive-descent parser for the piecewise polynomial language.
//!
//! ```text
//! source  := [header] body
//! header  := "dim" INT ";" | "vars" NAME ("," NAME)* ";"
//! body    := expr | clause (";" clause)* [";"]
//! clause  := "piece" region ":" expr | "else" [region] ":" expr
//! region  := atom ("&" atom)*
//! atom    := "box" "(" vec "," vec ")" | "values" "(" NAME "," vec ")"
//! vec     := "[" number ("," number)* "]"
//! expr    := term (("+" | "-") term)*
//! term    := factor (("*" | "·") factor)*
//! factor  := number | NAME | "(" expr ")" | "-" factor
//! number  := DIGITS ["/" DIGITS] | [DIGITS] "." DIGITS
//! ```

use super::{Atom, ClauseKind, PiecewisePolynomial, PolyPiece, PolyTerm, Region};
use crate::error::{Error, Result};
use crate::rational::{parse_rational, Q};
use num_traits::{One, Zero};
use std::collections::BTreeMap;

const KEYWORDS: [&str; 6] = ["dim", "vars", "piece", "else", "box", "values"];

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(Q),
    Name(String),
    Sym(char),
}

fn tokenize(src: &str) -> Result<Vec<(usize, Tok)>> {
    let mut out = Vec::new();
    let mut it = src.char_indices().peekable();
    while let Some(&(pos, c)) = it.peek() {
        if c.is_whitespace() {
            it.next();
        } else if c.is_ascii_digit() || c == '.' {
            let mut s = String::new();
            while let Some(&(_, d)) = it.peek() {
                if d.is_ascii_digit() || d == '.' {
                    s.push(d);
                    it.next();
                } else {
                    break;
                }
            }
            // A fraction literal is DIGITS "/" DIGITS with no spaces.
            if !s.contains('.') {
                let mut look = it.clone();
                if let Some((_, '/')) = look.next() {
                    if let Some(&(_, d)) = look.peek() {
                        if d.is_ascii_digit() {
                            it.next();
                            s.push('/');
                            while let Some(&(_, d)) = it.peek() {
                                if d.is_ascii_digit() {
                                    s.push(d);
                                    it.next();
                                } else {
                                    break;
                                }
                            }
                        }
                    }
                }
            }
            let v = parse_rational(&s).map_err(|_| Error::Syntax {
                pos,
                msg: format!("malformed number {s:?}"),
            })?;
            out.push((pos, Tok::Num(v)));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let mut s = String::new();
            while let Some(&(_, d)) = it.peek() {
                if d.is_ascii_alphanumeric() || d == '_' {
                    s.push(d);
                    it.next();
                } else {
                    break;
                }
            }
            out.push((pos, Tok::Name(s)));
        } else if "+-*·()[],;:&".contains(c) {
            let sym = if c == '·' { '*' } else { c };
            out.push((pos, Tok::Sym(sym)));
            it.next();
        } else {
            return Err(Error::Syntax { pos, msg: format!("unexpected character {c:?}") });
        }
    }
    Ok(out)
}

type Poly = BTreeMap<Vec<u32>, Q>;

fn poly_add(mut a: Poly, b: Poly) -> Poly {
    for (e, c) in b {
        let entry = a.entry(e).or_insert_with(Q::zero);
        *entry += c;
    }
    a.retain(|_, c| !c.is_zero());
    a
}

fn poly_mul(a: &Poly, b: &Poly) -> Poly {
    let mut out = Poly::new();
    for (ea, ca) in a {
        for (eb, cb) in b {
            let e: Vec<u32> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
            let entry = out.entry(e).or_insert_with(Q::zero);
            *entry += ca * cb;
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

fn poly_const(dim: usize, c: Q) -> Poly {
    let mut p = Poly::new();
    if !c.is_zero() {
        p.insert(vec![0; dim], c);
    }
    p
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    at: usize,
    end: usize,
    names: Vec<String>,
    default_names: bool,
    src: &'a str,
}

impl Parser<'_> {
    fn pos(&self) -> usize {
        self.toks.get(self.at).map(|t| t.0).unwrap_or(self.end)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Syntax { pos: self.pos(), msg: msg.into() })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|t| &t.1)
    }

    fn peek_sym(&self, c: char) -> bool {
        matches!(self.peek(), Some(Tok::Sym(s)) if *s == c)
    }

    fn peek_name(&self, n: &str) -> bool {
        matches!(self.peek(), Some(Tok::Name(s)) if s == n)
    }

    fn expect_sym(&mut self, c: char) -> Result<()> {
        if self.peek_sym(c) {
            self.at += 1;
            Ok(())
        } else {
            self.err(format!("expected {c:?}"))
        }
    }

    fn expect_name(&mut self) -> Result<String> {
        match self.peek() {
            Some(Tok::Name(s)) => {
                let s = s.clone();
                self.at += 1;
                Ok(s)
            }
            _ => self.err("expected a name"),
        }
    }

    fn number(&mut self) -> Result<Q> {
        let neg = if self.peek_sym('-') {
            self.at += 1;
            true
        } else {
            false
        };
        match self.peek() {
            Some(Tok::Num(v)) => {
                let v = v.clone();
                self.at += 1;
                Ok(if neg { -v } else { v })
            }
            _ => self.err("expected a number"),
        }
    }

    fn vector(&mut self) -> Result<Vec<Q>> {
        self.expect_sym('[')?;
        let mut v = vec![self.number()?];
        while self.peek_sym(',') {
            self.at += 1;
            v.push(self.number()?);
        }
        self.expect_sym(']')?;
        Ok(v)
    }

    fn var_index(&self, name: &str) -> Result<usize> {
        if let Some(i) = self.names.iter().position(|n| n == name) {
            return Ok(i);
        }
        if self.default_names {
            if let Some(rest) = name.strip_prefix('x') {
                if let Ok(i) = rest.parse::<usize>() {
                    if i >= 1 && !rest.starts_with('0') {
                        return Err(Error::DimensionMismatch(format!(
                            "variable {name} exceeds dimension {}",
                            self.names.len()
                        )));
                    }
                }
            }
        }
        self.err(format!("unknown variable {name:?}"))
    }

    fn expr(&mut self) -> Result<Poly> {
        let mut acc = self.term()?;
        loop {
            if self.peek_sym('+') {
                self.at += 1;
                let t = self.term()?;
                acc = poly_add(acc, t);
            } else if self.peek_sym('-') {
                self.at += 1;
                let t = self.term()?;
                let neg = poly_mul(&t, &poly_const(self.names.len(), -Q::one()));
                acc = poly_add(acc, neg);
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Poly> {
        let mut acc = self.factor()?;
        while self.peek_sym('*') {
            self.at += 1;
            let f = self.factor()?;
            acc = poly_mul(&acc, &f);
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Poly> {
        let dim = self.names.len();
        match self.peek().cloned() {
            Some(Tok::Num(v)) => {
                self.at += 1;
                Ok(poly_const(dim, v))
            }
            Some(Tok::Sym('-')) => {
                self.at += 1;
                let f = self.factor()?;
                Ok(poly_mul(&f, &poly_const(dim, -Q::one())))
            }
            Some(Tok::Sym('(')) => {
                self.at += 1;
                let e = self.expr()?;
                self.expect_sym(')')?;
                Ok(e)
            }
            Some(Tok::Name(n)) if !KEYWORDS.contains(&n.as_str()) => {
                let i = self.var_index(&n)?;
                self.at += 1;
                let mut e = vec![0; dim];
                e[i] = 1;
                let mut p = Poly::new();
                p.insert(e, Q::one());
                Ok(p)
            }
            _ => self.err("expected a number, variable or '('"),
        }
    }

    fn atom(&mut self) -> Result<Atom> {
        let dim = self.names.len();
        if self.peek_name("box") {
            self.at += 1;
            self.expect_sym('(')?;
            let lo = self.vector()?;
            self.expect_sym(',')?;
            let hi = self.vector()?;
            self.expect_sym(')')?;
            if lo.len() != dim || hi.len() != dim {
                return Err(Error::DimensionMismatch(format!(
                    "box corners must have {dim} entries"
                )));
            }
            if lo.iter().zip(&hi).any(|(a, b)| a > b) {
                return self.err("box lower corner exceeds upper corner");
            }
            Ok(Atom::Box { lo, hi })
        } else if self.peek_name("values") {
            self.at += 1;
            self.expect_sym('(')?;
            let name = self.expect_name()?;
            let var = self.var_index(&name)?;
            self.expect_sym(',')?;
            let mut values = self.vector()?;
            self.expect_sym(')')?;
            values.sort();
            values.dedup();
            Ok(Atom::Values { var, values })
        } else {
            self.err("expected 'box' or 'values'")
        }
    }

    fn region(&mut self) -> Result<Region> {
        let mut atoms = vec![self.atom()?];
        while self.peek_sym('&') {
            self.at += 1;
            atoms.push(self.atom()?);
        }
        Ok(Region { atoms })
    }

    fn header(&mut self, dim: usize) -> Result<()> {
        if self.peek_name("dim") {
            self.at += 1;
            let d = self.number()?;
            if d != Q::from_integer(dim.into()) {
                return Err(Error::DimensionMismatch(format!(
                    "source declares dim {d}, expected {dim}"
                )));
            }
            self.expect_sym(';')?;
        } else if self.peek_name("vars") {
            self.at += 1;
            let mut names = vec![self.expect_name()?];
            while self.peek_sym(',') {
                self.at += 1;
                names.push(self.expect_name()?);
            }
            self.expect_sym(';')?;
            if names.len() != dim {
                return Err(Error::DimensionMismatch(format!(
                    "source declares {} variables, expected {dim}",
                    names.len()
                )));
            }
            for (i, n) in names.iter().enumerate() {
                if KEYWORDS.contains(&n.as_str()) || names[..i].contains(n) {
                    return self.err(format!("invalid or repeated variable name {n:?}"));
                }
            }
            self.default_names = names == super::default_names(dim);
            self.names = names;
        }
        Ok(())
    }

    fn body(&mut self) -> Result<Vec<PolyPiece>> {
        let to_terms = |p: Poly| -> Vec<PolyTerm> {
            p.into_iter().map(|(exps, coeff)| PolyTerm { coeff, exps }).collect()
        };
        if !(self.peek_name("piece") || self.peek_name("else")) {
            let e = self.expr()?;
            return Ok(vec![PolyPiece {
                kind: ClauseKind::Else,
                region: Region::always(),
                terms: to_terms(e),
            }]);
        }
        let mut pieces = Vec::new();
        loop {
            let kind = if self.peek_name("piece") {
                ClauseKind::Piece
            } else if self.peek_name("else") {
                ClauseKind::Else
            } else {
                return self.err("expected 'piece' or 'else'");
            };
            self.at += 1;
            let region = if kind == ClauseKind::Else && self.peek_sym(':') {
                Region::always()
            } else {
                self.region()?
            };
            self.expect_sym(':')?;
            let e = self.expr()?;
            pieces.push(PolyPiece { kind, region, terms: to_terms(e) });
            if self.peek_sym(';') {
                self.at += 1;
            }
            if self.peek().is_none() {
                return Ok(pieces);
            }
        }
    }
}

/// Parses `src` into a canonical piecewise polynomial over `dim` variables.
pub fn parse(src: &str, dim: usize) -> Result<PiecewisePolynomial> {
    let toks = tokenize(src)?;
    let mut p = Parser {
        toks,
        at: 0,
        end: src.len(),
        names: super::default_names(dim),
        default_names: true,
        src,
    };
    p.header(dim)?;
    let pieces = p.body()?;
    if p.peek().is_some() {
        return p.err(format!("unexpected trailing input in {:?}", p.src));
    }
    PiecewisePolynomial::from_parts(p.names, pieces)
}
