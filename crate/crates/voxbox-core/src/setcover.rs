//! Exact minimum-cardinality set cover by branch and bound.

use crate::error::{Error, Result};
use std::collections::BTreeSet;

#[derive(Clone, PartialEq, Eq)]
struct Bits(Vec<u64>);

impl Bits {
    fn new(n: usize) -> Self {
        Bits(vec![0; n.div_ceil(64)])
    }

    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    fn get(&self, i: usize) -> bool {
        self.0[i / 64] >> (i % 64) & 1 == 1
    }

    fn count(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }

    fn count_and_not(&self, covered: &Bits) -> usize {
        self.0.iter().zip(&covered.0).map(|(a, c)| (a & !c).count_ones() as usize).sum()
    }

    fn or_assign(&mut self, o: &Bits) {
        for (a, b) in self.0.iter_mut().zip(&o.0) {
            *a |= b;
        }
    }
}

/// Result of an exact cover search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverSolution {
    /// Minimum number of sets.
    pub size: usize,
    /// Distinct optimal covers (set indices in ascending order), in
    /// lexicographic order, at most the requested number.
    pub covers: Vec<Vec<usize>>,
}

struct Search<'a> {
    sets: &'a [Bits],
    by_elem: Vec<Vec<usize>>,
    n: usize,
    max_size: usize,
    best: usize,
    found: BTreeSet<Vec<usize>>,
    cap: usize,
    nodes: u64,
    node_limit: u64,
}

impl Search<'_> {
    fn run(&mut self, covered: &mut Bits, chosen: &mut Vec<usize>, count: usize) -> Result<()> {
        self.nodes += 1;
        if self.nodes > self.node_limit {
            return Err(Error::BudgetExceeded { size: self.nodes as usize, budget: self.node_limit as usize });
        }
        let left = self.n - count;
        if left == 0 {
            let mut c = chosen.clone();
            c.sort_unstable();
            if c.len() < self.best {
                self.best = c.len();
                self.found.clear();
            }
            if self.found.len() < self.cap {
                self.found.insert(c);
            }
            return Ok(());
        }
        let lb = left.div_ceil(self.max_size);
        let full = self.found.len() >= self.cap;
        if chosen.len() + lb > self.best || (full && chosen.len() + lb >= self.best) {
            return Ok(());
        }
        let elem = (0..self.n)
            .filter(|&e| !covered.get(e))
            .min_by_key(|&e| self.by_elem[e].len())
            .expect("an uncovered element exists");
        let mut cands: Vec<(usize, usize)> =
            self.by_elem[elem].iter().map(|&s| (self.sets[s].count_and_not(covered), s)).collect();
        cands.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
        for (gain, s) in cands {
            let saved = covered.clone();
            covered.or_assign(&self.sets[s]);
            chosen.push(s);
            self.run(covered, chosen, count + gain)?;
            chosen.pop();
            *covered = saved;
        }
        Ok(())
    }
}

/// Minimum number of sets whose union is `0..n`, with up to `cap` distinct
/// optimal covers. Fails when some element lies in no set or the search
/// visits more than `node_limit` nodes.
pub fn exact_cover(n: usize, sets: &[Vec<usize>], cap: usize, node_limit: u64) -> Result<CoverSolution> {
    let mut bits = Vec::with_capacity(sets.len());
    let mut by_elem = vec![Vec::new(); n];
    for (i, s) in sets.iter().enumerate() {
        let mut b = Bits::new(n);
        for &e in s {
            if e >= n {
                return Err(Error::IndexOutOfRange(format!("element {e} not in 0..{n}")));
            }
            if !b.get(e) {
                b.set(e);
                by_elem[e].push(i);
            }
        }
        bits.push(b);
    }
    if let Some(e) = by_elem.iter().position(|v| v.is_empty()) {
        return Err(Error::InvalidArgument(format!("element {e} lies in no set")));
    }
    if n == 0 {
        return Ok(CoverSolution { size: 0, covers: vec![vec![]] });
    }
    let max_size = bits.iter().map(Bits::count).max().unwrap_or(1).max(1);
    let mut search = Search {
        sets: &bits,
        by_elem,
        n,
        max_size,
        best: usize::MAX,
        found: BTreeSet::new(),
        cap: cap.max(1),
        nodes: 0,
        node_limit,
    };
    search.run(&mut Bits::new(n), &mut Vec::new(), 0)?;
    Ok(CoverSolution { size: search.best, covers: search.found.into_iter().collect() })
}
