//! Special-3SC set systems: `m` groups of five sets built from triples
//! `i < j < k` of `A = {a_1..a_n}`, with every `a_i` in exactly two triples.

use crate::error::{Error, Result};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::fmt;

/// An element of the universe `A + W + X + Y + Z` (1-based indices).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Elem {
    A(usize),
    W(usize),
    X(usize),
    Y(usize),
    Z(usize),
}

impl fmt::Display for Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Elem::A(i) => write!(f, "a{i}"),
            Elem::W(t) => write!(f, "w{t}"),
            Elem::X(t) => write!(f, "x{t}"),
            Elem::Y(t) => write!(f, "y{t}"),
            Elem::Z(t) => write!(f, "z{t}"),
        }
    }
}

impl Elem {
    fn parse(s: &str) -> Option<Elem> {
        let (head, tail) = s.split_at(1.min(s.len()));
        let i: usize = tail.parse().ok().filter(|&i| i >= 1)?;
        Some(match head {
            "a" => Elem::A(i),
            "w" => Elem::W(i),
            "x" => Elem::X(i),
            "y" => Elem::Y(i),
            "z" => Elem::Z(i),
            _ => return None,
        })
    }
}

/// A Special-3SC instance given by its triples.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Special3SC {
    n: usize,
    triples: Vec<[usize; 3]>,
}

impl Special3SC {
    /// Builds and validates an instance from its triples.
    pub fn new(n: usize, triples: Vec<[usize; 3]>) -> Result<Self> {
        let s = Special3SC { n, triples };
        s.validate()?;
        Ok(s)
    }

    /// Samples an instance with `m` groups (`m` even, `n = 3m/2`): each `a`
    /// appears twice in a shuffled list that is cut into triples, retrying
    /// until every triple has three distinct elements.
    pub fn sample(m: usize, seed: u64) -> Result<Self> {
        if m == 0 || m % 2 == 1 {
            return Err(Error::InvalidArgument(format!("group count {m} must be positive and even")));
        }
        let n = 3 * m / 2;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut slots: Vec<usize> = (1..=n).flat_map(|i| [i, i]).collect();
        loop {
            slots.shuffle(&mut rng);
            let triples: Vec<[usize; 3]> = slots
                .chunks(3)
                .map(|c| {
                    let mut t = [c[0], c[1], c[2]];
                    t.sort_unstable();
                    t
                })
                .collect();
            if triples.iter().all(|t| t[0] < t[1] && t[1] < t[2]) {
                return Self::new(n, triples);
            }
        }
    }

    /// Number of `a` elements.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of groups.
    pub fn m(&self) -> usize {
        self.triples.len()
    }

    /// Triples `(i, j, k)` with `i < j < k`, one per group.
    pub fn triples(&self) -> &[[usize; 3]] {
        &self.triples
    }

    /// Checks `2n = 3m`, ordered triples within `1..=n` and that every `a`
    /// lies in exactly two triples.
    pub fn validate(&self) -> Result<()> {
        if 2 * self.n != 3 * self.m() || self.m() == 0 {
            return Err(Error::InvalidArgument(format!("need 2n = 3m, got n = {}, m = {}", self.n, self.m())));
        }
        let mut uses = vec![0; self.n + 1];
        for t in &self.triples {
            if !(1 <= t[0] && t[0] < t[1] && t[1] < t[2] && t[2] <= self.n) {
                return Err(Error::InvalidArgument(format!("triple {t:?} is not increasing within 1..={}", self.n)));
            }
            for &a in t {
                uses[a] += 1;
            }
        }
        if let Some(a) = (1..=self.n).find(|&a| uses[a] != 2) {
            return Err(Error::InvalidArgument(format!("a{a} lies in {} sets, expected 2", uses[a])));
        }
        Ok(())
    }

    /// Universe in the order `a_1..a_n`, then `w_t, x_t, y_t, z_t` per group.
    pub fn universe(&self) -> Vec<Elem> {
        let mut u: Vec<Elem> = (1..=self.n).map(Elem::A).collect();
        for t in 1..=self.m() {
            u.extend([Elem::W(t), Elem::X(t), Elem::Y(t), Elem::Z(t)]);
        }
        u
    }

    /// The five sets of every group in order:
    /// `{a_i, w}`, `{w, x}`, `{a_j, x, y}`, `{y, z}`, `{a_k, z}`.
    pub fn sets(&self) -> Vec<Vec<Elem>> {
        let mut out = Vec::with_capacity(5 * self.m());
        for (t0, &[i, j, k]) in self.triples.iter().enumerate() {
            let t = t0 + 1;
            out.push(vec![Elem::A(i), Elem::W(t)]);
            out.push(vec![Elem::W(t), Elem::X(t)]);
            out.push(vec![Elem::A(j), Elem::X(t), Elem::Y(t)]);
            out.push(vec![Elem::Y(t), Elem::Z(t)]);
            out.push(vec![Elem::A(k), Elem::Z(t)]);
        }
        out
    }

    /// Text form: `n m`, then the five sets of each group, one per line.
    pub fn to_text(&self) -> String {
        let mut s = format!("{} {}\n", self.n, self.m());
        for set in self.sets() {
            let names: Vec<String> = set.iter().map(|e| e.to_string()).collect();
            s.push_str(&names.join(" "));
            s.push('\n');
        }
        s
    }

    /// Parses the text form; `#` lines are comments. Every group must
    /// follow the five-set template.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let syntax = |ln: usize, msg: &str| Error::Syntax { pos: ln, msg: format!("line {ln}: {msg}") };
        let (ln, head) = lines.next().ok_or_else(|| syntax(0, "missing 'n m' header"))?;
        let nums: Vec<usize> = head
            .split_whitespace()
            .map(|s| s.parse().map_err(|_| syntax(ln, "expected natural numbers")))
            .collect::<Result<_>>()?;
        let [n, m] = nums[..] else {
            return Err(syntax(ln, "header must read 'n m'"));
        };
        let mut triples = Vec::with_capacity(m);
        for t in 1..=m {
            let mut group = Vec::with_capacity(5);
            for _ in 0..5 {
                let (ln, l) = lines.next().ok_or_else(|| syntax(0, "fewer sets than declared"))?;
                let set: Vec<Elem> = l
                    .split_whitespace()
                    .map(|s| Elem::parse(s).ok_or_else(|| syntax(ln, &format!("bad element {s:?}"))))
                    .collect::<Result<_>>()?;
                group.push((ln, set));
            }
            let a_of = |g: &(usize, Vec<Elem>), rest: &[Elem]| -> Result<usize> {
                match g.1.as_slice() {
                    [Elem::A(i), tail @ ..] if tail == rest => Ok(*i),
                    _ => Err(syntax(g.0, &format!("set does not match the template of group {t}"))),
                }
            };
            let i = a_of(&group[0], &[Elem::W(t)])?;
            let j = a_of(&group[2], &[Elem::X(t), Elem::Y(t)])?;
            let k = a_of(&group[4], &[Elem::Z(t)])?;
            if group[1].1 != [Elem::W(t), Elem::X(t)] || group[3].1 != [Elem::Y(t), Elem::Z(t)] {
                return Err(syntax(group[1].0, &format!("pair sets of group {t} do not match the template")));
            }
            triples.push([i, j, k]);
        }
        if let Some((ln, _)) = lines.next() {
            return Err(syntax(ln, "more sets than declared"));
        }
        Self::new(n, triples)
    }
}
