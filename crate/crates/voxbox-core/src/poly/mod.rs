//! Piecewise multivariate polynomials with exact rational coefficients.
//!
//! A polynomial is a list of clauses. `piece` clauses carry pairwise disjoint
//! regions. `else` clauses are fallbacks tried in order for points outside
//! every `piece` region; an unguarded `else` applies everywhere else. A region
//! is a conjunction of axis boxes and value-set constraints on one coordinate.
//!
//! The canonical printed form is ASCII and is what the codec stores, so
//! [`PiecewisePolynomial::len`] counts bytes of that form.

mod parse;

use crate::error::{Error, Result};
use crate::rational::{fmt_rational, Q};
use num_traits::{One, Zero};
use std::fmt;

/// One monomial `coeff * prod x_j^exps[j]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PolyTerm {
    pub coeff: Q,
    pub exps: Vec<u32>,
}

impl PolyTerm {
    /// Total degree of the monomial.
    pub fn degree(&self) -> u32 {
        self.exps.iter().sum()
    }

    fn eval(&self, x: &[Q]) -> Q {
        let mut acc = self.coeff.clone();
        for (xi, &e) in x.iter().zip(&self.exps) {
            for _ in 0..e {
                acc *= xi;
            }
        }
        acc
    }
}

/// A single constraint of a region.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Atom {
    /// Closed axis box `lo <= x <= hi` over all coordinates.
    Box { lo: Vec<Q>, hi: Vec<Q> },
    /// Coordinate `var` (0-based) takes one of the sorted `values`.
    Values { var: usize, values: Vec<Q> },
}

impl Atom {
    fn contains(&self, x: &[Q]) -> bool {
        match self {
            Atom::Box { lo, hi } => x.iter().zip(lo.iter().zip(hi)).all(|(v, (a, b))| a <= v && v <= b),
            Atom::Values { var, values } => values.binary_search(&x[*var]).is_ok(),
        }
    }
}

/// Conjunction of atoms; the empty conjunction is the whole space.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Region {
    pub atoms: Vec<Atom>,
}

/// Coarse classification of a region.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegionKind {
    Always,
    Box,
    ValueSet,
    Conjunction,
}

impl Region {
    /// The region containing every point.
    pub fn always() -> Self {
        Region { atoms: Vec::new() }
    }

    /// A single closed box.
    pub fn boxed(lo: Vec<Q>, hi: Vec<Q>) -> Self {
        Region { atoms: vec![Atom::Box { lo, hi }] }
    }

    /// Coordinate `var` restricted to `values`.
    pub fn values(var: usize, mut values: Vec<Q>) -> Self {
        values.sort();
        values.dedup();
        Region { atoms: vec![Atom::Values { var, values }] }
    }

    /// Classifies the region by its atoms.
    pub fn kind(&self) -> RegionKind {
        match self.atoms.as_slice() {
            [] => RegionKind::Always,
            [Atom::Box { .. }] => RegionKind::Box,
            [Atom::Values { .. }] => RegionKind::ValueSet,
            _ => RegionKind::Conjunction,
        }
    }

    /// Membership test.
    pub fn contains(&self, x: &[Q]) -> bool {
        self.atoms.iter().all(|a| a.contains(x))
    }

    /// Per-coordinate view: the box interval and the admissible value set.
    pub fn constraints(&self, dim: usize) -> Vec<CoordConstraint> {
        let mut out = vec![CoordConstraint::default(); dim];
        for a in &self.atoms {
            match a {
                Atom::Box { lo, hi } => {
                    for (j, c) in out.iter_mut().enumerate() {
                        c.tighten(Some(&lo[j]), Some(&hi[j]));
                    }
                }
                Atom::Values { var, values } => out[*var].restrict(values),
            }
        }
        out
    }

    /// True when some point of `R^dim` satisfies both regions.
    pub fn intersects(&self, other: &Region, dim: usize) -> bool {
        let both = Region { atoms: self.atoms.iter().chain(&other.atoms).cloned().collect() };
        both.constraints(dim).iter().all(|c| c.is_satisfiable())
    }
}

/// Constraint on one coordinate derived from a region.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CoordConstraint {
    pub lo: Option<Q>,
    pub hi: Option<Q>,
    pub values: Option<Vec<Q>>,
}

impl CoordConstraint {
    fn tighten(&mut self, lo: Option<&Q>, hi: Option<&Q>) {
        if let Some(l) = lo {
            if self.lo.as_ref().is_none_or(|c| l > c) {
                self.lo = Some(l.clone());
            }
        }
        if let Some(h) = hi {
            if self.hi.as_ref().is_none_or(|c| h < c) {
                self.hi = Some(h.clone());
            }
        }
    }

    fn restrict(&mut self, values: &[Q]) {
        self.values = Some(match &self.values {
            None => values.to_vec(),
            Some(cur) => cur.iter().filter(|v| values.binary_search(v).is_ok()).cloned().collect(),
        });
    }

    /// Admits `v`.
    pub fn admits(&self, v: &Q) -> bool {
        self.lo.as_ref().is_none_or(|l| l <= v)
            && self.hi.as_ref().is_none_or(|h| v <= h)
            && self.values.as_ref().is_none_or(|s| s.binary_search(v).is_ok())
    }

    /// Admissible values of a value-set constraint inside the interval.
    pub fn feasible_values(&self) -> Option<Vec<Q>> {
        self.values.as_ref().map(|s| {
            s.iter()
                .filter(|v| self.lo.as_ref().is_none_or(|l| l <= *v) && self.hi.as_ref().is_none_or(|h| *v <= h))
                .cloned()
                .collect()
        })
    }

    fn is_satisfiable(&self) -> bool {
        let interval_ok = match (&self.lo, &self.hi) {
            (Some(l), Some(h)) => l <= h,
            _ => true,
        };
        interval_ok && self.feasible_values().is_none_or(|v| !v.is_empty())
    }
}

/// Whether a clause is a primary piece or an ordered fallback.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ClauseKind {
    Piece,
    Else,
}

/// One clause: a region and the polynomial valid on it.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PolyPiece {
    pub kind: ClauseKind,
    pub region: Region,
    pub terms: Vec<PolyTerm>,
}

impl PolyPiece {
    /// Evaluates this clause's polynomial, ignoring its region.
    pub fn eval_terms(&self, x: &[Q]) -> Q {
        self.terms.iter().fold(Q::zero(), |acc, t| acc + t.eval(x))
    }

    /// The constant value when the polynomial has no variable terms.
    pub fn constant(&self) -> Option<Q> {
        match self.terms.as_slice() {
            [] => Some(Q::zero()),
            [t] if t.degree() == 0 => Some(t.coeff.clone()),
            _ => None,
        }
    }
}

/// Symbolic energy function `f: Q^D -> Q`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PiecewisePolynomial {
    dim: usize,
    names: Vec<String>,
    pieces: Vec<PolyPiece>,
    source: String,
}

/// Default variable names `x1..xD`.
pub fn default_names(dim: usize) -> Vec<String> {
    (1..=dim).map(|i| format!("x{i}")).collect()
}

/// Parses `src` over `dim` variables; see the module docs for the grammar.
pub fn parse_polynomial(src: &str, dim: usize) -> Result<PiecewisePolynomial> {
    parse::parse(src, dim)
}

/// Parses a source whose header (`dim D;` or `vars ...;`) fixes the dimension.
pub fn parse_self_describing(src: &str) -> Result<PiecewisePolynomial> {
    let t = src.trim_start();
    let dim = if let Some(rest) = t.strip_prefix("dim") {
        let num: String = rest.trim_start().chars().take_while(|c| c.is_ascii_digit()).collect();
        num.parse::<usize>().map_err(|_| Error::Syntax { pos: 0, msg: "malformed dim header".into() })?
    } else if let Some(rest) = t.strip_prefix("vars") {
        let decl = rest.split(';').next().unwrap_or("");
        decl.split(',').count()
    } else {
        return Err(Error::Syntax { pos: 0, msg: "missing 'dim' or 'vars' header".into() });
    };
    parse::parse(src, dim)
}

impl PiecewisePolynomial {
    /// Builds a polynomial from clauses, canonicalizing terms and checking
    /// that `piece` regions (and guarded `else` regions) are disjoint.
    pub fn from_parts(names: Vec<String>, pieces: Vec<PolyPiece>) -> Result<Self> {
        let dim = names.len();
        let mut prim = Vec::new();
        let mut fall = Vec::new();
        for mut p in pieces {
            if p.terms.iter().any(|t| t.exps.len() != dim) {
                return Err(Error::DimensionMismatch(format!("term exponent vectors must have length {dim}")));
            }
            for a in &p.region.atoms {
                match a {
                    Atom::Box { lo, hi } if lo.len() != dim || hi.len() != dim => {
                        return Err(Error::DimensionMismatch(format!("box corners must have {dim} entries")))
                    }
                    Atom::Values { var, .. } if *var >= dim => {
                        return Err(Error::DimensionMismatch(format!("value-set variable index {} > {dim}", var + 1)))
                    }
                    _ => {}
                }
            }
            canonical_terms(&mut p.terms);
            match p.kind {
                ClauseKind::Piece => prim.push(p),
                ClauseKind::Else => fall.push(p),
            }
        }
        check_disjoint(&prim, dim, "piece")?;
        let guarded: Vec<_> = fall.iter().filter(|p| !p.region.atoms.is_empty()).cloned().collect();
        check_disjoint(&guarded, dim, "else")?;
        let unguarded = fall.iter().filter(|p| p.region.atoms.is_empty()).count();
        if unguarded > 1 {
            return Err(Error::OverlappingPieces("more than one unguarded else clause".into()));
        }
        // Unguarded fallback last, guarded fallbacks keep their order.
        fall.sort_by_key(|p| p.region.atoms.is_empty());
        prim.extend(fall);
        let mut f = PiecewisePolynomial { dim, names, pieces: prim, source: String::new() };
        f.source = f.print();
        Ok(f)
    }

    /// A single polynomial valid everywhere.
    pub fn single(names: Vec<String>, terms: Vec<PolyTerm>) -> Result<Self> {
        Self::from_parts(names, vec![PolyPiece { kind: ClauseKind::Else, region: Region::always(), terms }])
    }

    /// The constant function `c` on `R^dim`.
    pub fn constant(dim: usize, c: Q) -> Self {
        let terms = vec![PolyTerm { coeff: c, exps: vec![0; dim] }];
        Self::single(default_names(dim), terms).expect("constant polynomial is well formed")
    }

    /// Ambient dimension `D`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Variable names in coordinate order.
    pub fn names(&self) -> &[String] {
        &self.names
    }

    /// Clauses in evaluation order (pieces, then fallbacks).
    pub fn pieces(&self) -> &[PolyPiece] {
        &self.pieces
    }

    /// Canonical ASCII source.
    pub fn canonical(&self) -> &str {
        &self.source
    }

    /// `len(f)`: byte count of the canonical source.
    pub fn len(&self) -> usize {
        self.source.len()
    }

    /// Always false; the canonical source contains at least a header.
    pub fn is_empty(&self) -> bool {
        self.source.is_empty()
    }

    /// `size(f) = 8 len(f)` under the 8-bit alphabet convention.
    pub fn size_bits(&self) -> usize {
        8 * self.len()
    }

    /// Maximum total degree over every term of every clause.
    pub fn degree(&self) -> u32 {
        self.pieces.iter().flat_map(|p| p.terms.iter().map(PolyTerm::degree)).max().unwrap_or(0)
    }

    /// Index of the clause that defines `f` at `x`, if any.
    pub fn active_piece(&self, x: &[Q]) -> Option<usize> {
        self.pieces.iter().position(|p| p.region.contains(x))
    }

    /// Exact value of `f` at `x`.
    pub fn eval(&self, x: &[Q]) -> Result<Q> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch(format!("point has {} entries, expected {}", x.len(), self.dim)));
        }
        let i = self.active_piece(x).ok_or(Error::UndefinedRegion)?;
        Ok(self.pieces[i].eval_terms(x))
    }

    /// The embedding of `f` into `R^new_dim`: equal to `f` on the slab where
    /// the added coordinates vanish and `0` elsewhere.
    pub fn lift(&self, new_dim: usize) -> Result<Self> {
        if new_dim < self.dim {
            return Err(Error::InvalidArgument(format!("cannot lift dimension {} to {new_dim}", self.dim)));
        }
        if new_dim == self.dim {
            return Ok(self.clone());
        }
        let extra = new_dim - self.dim;
        let mut names = self.names.clone();
        let defaults = self.names == default_names(self.dim);
        for j in self.dim + 1..=new_dim {
            let mut n = format!("x{j}");
            while !defaults && names.contains(&n) {
                n.push('_');
            }
            names.push(n);
        }
        let slab: Vec<Atom> = (self.dim..new_dim).map(|v| Atom::Values { var: v, values: vec![Q::zero()] }).collect();
        let mut pieces = Vec::new();
        for p in &self.pieces {
            let mut has_box = false;
            let mut atoms: Vec<Atom> = p
                .region
                .atoms
                .iter()
                .map(|a| match a {
                    Atom::Box { lo, hi } => {
                        has_box = true;
                        let pad = |v: &Vec<Q>| v.iter().cloned().chain(std::iter::repeat_n(Q::zero(), extra)).collect();
                        Atom::Box { lo: pad(lo), hi: pad(hi) }
                    }
                    other => other.clone(),
                })
                .collect();
            if !has_box {
                atoms.extend(slab.iter().cloned());
            }
            let terms = p
                .terms
                .iter()
                .map(|t| PolyTerm {
                    coeff: t.coeff.clone(),
                    exps: t.exps.iter().cloned().chain(std::iter::repeat_n(0, extra)).collect(),
                })
                .collect();
            pieces.push(PolyPiece { kind: p.kind, region: Region { atoms }, terms });
        }
        pieces.push(PolyPiece { kind: ClauseKind::Else, region: Region::always(), terms: Vec::new() });
        Self::from_parts(names, pieces)
    }

    fn print(&self) -> String {
        let mut s = if self.names == default_names(self.dim) {
            format!("dim {};", self.dim)
        } else {
            format!("vars {};", self.names.join(","))
        };
        if let [only] = self.pieces.as_slice() {
            if only.kind == ClauseKind::Else && only.region.atoms.is_empty() {
                s.push_str(&self.print_terms(&only.terms));
                return s;
            }
        }
        let clauses: Vec<String> = self
            .pieces
            .iter()
            .map(|p| {
                let head = match (p.kind, p.region.atoms.is_empty()) {
                    (ClauseKind::Else, true) => "else".to_string(),
                    (ClauseKind::Else, false) => format!("else {}", self.print_region(&p.region)),
                    (ClauseKind::Piece, _) => format!("piece {}", self.print_region(&p.region)),
                };
                format!("{head}:{}", self.print_terms(&p.terms))
            })
            .collect();
        s.push_str(&clauses.join(";"));
        s
    }

    fn print_region(&self, r: &Region) -> String {
        let vec = |v: &[Q]| format!("[{}]", v.iter().map(fmt_rational).collect::<Vec<_>>().join(","));
        r.atoms
            .iter()
            .map(|a| match a {
                Atom::Box { lo, hi } => format!("box({},{})", vec(lo), vec(hi)),
                Atom::Values { var, values } => format!("values({},{})", self.names[*var], vec(values)),
            })
            .collect::<Vec<_>>()
            .join("&")
    }

    fn print_terms(&self, terms: &[PolyTerm]) -> String {
        if terms.is_empty() {
            return "0".into();
        }
        terms
            .iter()
            .map(|t| {
                let vars: Vec<&str> = t
                    .exps
                    .iter()
                    .enumerate()
                    .flat_map(|(j, &e)| std::iter::repeat_n(self.names[j].as_str(), e as usize))
                    .collect();
                if vars.is_empty() {
                    fmt_rational(&t.coeff)
                } else if t.coeff.is_one() {
                    vars.join("*")
                } else if t.coeff == -Q::one() {
                    format!("-{}", vars.join("*"))
                } else {
                    format!("{}*{}", fmt_rational(&t.coeff), vars.join("*"))
                }
            })
            .collect::<Vec<_>>()
            .join("+")
    }
}

impl fmt::Display for PiecewisePolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.source)
    }
}

fn canonical_terms(terms: &mut Vec<PolyTerm>) {
    let mut merged: std::collections::BTreeMap<Vec<u32>, Q> = std::collections::BTreeMap::new();
    for t in terms.drain(..) {
        *merged.entry(t.exps).or_insert_with(Q::zero) += t.coeff;
    }
    terms.extend(merged.into_iter().filter(|(_, c)| !c.is_zero()).map(|(exps, coeff)| PolyTerm { coeff, exps }));
    terms.sort_by(|a, b| b.degree().cmp(&a.degree()).then_with(|| b.exps.cmp(&a.exps)));
}

fn check_disjoint(pieces: &[PolyPiece], dim: usize, what: &str) -> Result<()> {
    for (i, a) in pieces.iter().enumerate() {
        if a.region.atoms.is_empty() {
            return Err(Error::OverlappingPieces(format!("{what} clause {} has no region", i + 1)));
        }
        for (j, b) in pieces.iter().enumerate().skip(i + 1) {
            if a.region.intersects(&b.region, dim) {
                return Err(Error::OverlappingPieces(format!("{what} clauses {} and {} intersect", i + 1, j + 1)));
            }
        }
    }
    Ok(())
}
