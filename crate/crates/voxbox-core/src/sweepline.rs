//! Interval tree of disjoint integer intervals and the bottom-to-top sweep
//! that covers the complement of a union of boxes on the grid `[q]^2`.
//!
//! The sweep keeps one open strip per maximal run of free cells in the
//! current row. When the coverage of a row changes, the strips touching the
//! changed columns are closed into boxes and the free runs over the affected
//! span are reopened, so strips are always maximal runs and never overlap.

use crate::boxgeom::{GridBox, RangeSpace};
use crate::error::{Error, Result};
use std::collections::BTreeMap;

/// Closed integer interval `[lo, hi]`.
pub type Interval = (usize, usize);

/// How a query interval selects stored intervals.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QueryMode {
    /// Stored intervals contained in the query interval.
    Contained,
    /// Stored intervals sharing at least one point with the query interval.
    Intersect,
}

/// Ordered set of pairwise disjoint closed integer intervals, each with a
/// payload (the birth row of a strip in the sweep).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct IntervalTree<V> {
    map: BTreeMap<usize, (usize, V)>,
}

impl<V: Clone> IntervalTree<V> {
    /// Empty tree.
    pub fn new() -> Self {
        IntervalTree { map: BTreeMap::new() }
    }

    /// Number of stored intervals.
    pub fn len(&self) -> usize {
        self.map.len()
    }

    /// True when nothing is stored.
    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    /// Stored intervals in order.
    pub fn intervals(&self) -> Vec<(Interval, V)> {
        self.map.iter().map(|(&a, (b, v))| ((a, *b), v.clone())).collect()
    }

    /// Adds an interval; fails when it is reversed or meets a stored one.
    pub fn insert(&mut self, iv: Interval, value: V) -> Result<()> {
        check(iv)?;
        if !self.query(iv, QueryMode::Intersect).is_empty() {
            return Err(Error::InvalidArgument(format!("interval [{}, {}] overlaps a stored interval", iv.0, iv.1)));
        }
        self.map.insert(iv.0, (iv.1, value));
        Ok(())
    }

    /// Removes an exact match and returns its payload; does nothing when absent.
    pub fn delete(&mut self, iv: Interval) -> Option<V> {
        match self.map.get(&iv.0) {
            Some((b, _)) if *b == iv.1 => self.map.remove(&iv.0).map(|(_, v)| v),
            _ => None,
        }
    }

    /// Stored intervals selected by `mode`, in order.
    pub fn query(&self, iv: Interval, mode: QueryMode) -> Vec<(Interval, V)> {
        let mut out = Vec::new();
        if iv.0 > iv.1 {
            return out;
        }
        if let Some((&a, (b, v))) = self.map.range(..iv.0).next_back() {
            if *b >= iv.0 && mode == QueryMode::Intersect {
                out.push(((a, *b), v.clone()));
            }
        }
        for (&a, (b, v)) in self.map.range(iv.0..=iv.1) {
            if mode == QueryMode::Intersect || *b <= iv.1 {
                out.push(((a, *b), v.clone()));
            }
        }
        out
    }
}

fn check(iv: Interval) -> Result<()> {
    if iv.0 > iv.1 {
        return Err(Error::InvalidArgument(format!("interval [{}, {}] is reversed", iv.0, iv.1)));
    }
    Ok(())
}

/// Which side of a box an event marks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum EventKind {
    /// Lowest row of a box.
    Bottom,
    /// Highest row of a box.
    Top,
}

/// A sweep event: the lowest or highest row of a box. `id` is the box index,
/// or `None` for the two synthetic events bounding the grid.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepEvent {
    pub y: usize,
    pub kind: EventKind,
    pub id: Option<usize>,
    pub bx: GridBox,
}

/// Events of a planar range space ordered by row, bottoms before tops, then
/// by box index, between a synthetic top event on row 1 and a synthetic
/// bottom event on row `q`.
pub fn sweep_events(space: &RangeSpace) -> Result<Vec<SweepEvent>> {
    planar(space)?;
    let q = space.q;
    let mut ev = Vec::with_capacity(2 * space.boxes.len() + 2);
    for (i, b) in space.boxes.iter().enumerate() {
        ev.push(SweepEvent { y: b.c1()[1], kind: EventKind::Bottom, id: Some(i), bx: b.clone() });
        ev.push(SweepEvent { y: b.c2()[1], kind: EventKind::Top, id: Some(i), bx: b.clone() });
    }
    ev.sort_by_key(|a| (a.y, a.kind, a.id));
    let row = |y| GridBox::new(vec![1, y], vec![q, y]);
    ev.insert(0, SweepEvent { y: 1, kind: EventKind::Top, id: None, bx: row(1)? });
    ev.push(SweepEvent { y: q, kind: EventKind::Bottom, id: None, bx: row(q)? });
    Ok(ev)
}

fn planar(space: &RangeSpace) -> Result<()> {
    if space.k != 2 {
        return Err(Error::DimensionMismatch(format!("the sweep needs a planar grid, got k = {}", space.k)));
    }
    if space.q == 0 {
        return Err(Error::InvalidArgument("grid side must be positive".into()));
    }
    Ok(())
}

/// Free gaps beside `iv` along dimension 1, given the first-dimension box
/// intervals of a row. The left gap runs from just after the nearest box
/// end at or left of `lo - 1` up to `lo - 1`; it degenerates to `[lo, lo]`
/// when a box starts there instead or no cell is free. The right gap is
/// symmetric and degenerates to `[hi, hi]`.
pub fn adjacent_neighbors(iv: Interval, boxes_x: &[Interval], q: usize) -> Result<(Interval, Interval)> {
    check(iv)?;
    let mut events: Vec<(usize, EventKind)> = vec![(0, EventKind::Top), (q + 1, EventKind::Bottom)];
    for &(a, b) in boxes_x {
        check((a, b))?;
        events.push((a, EventKind::Bottom));
        events.push((b, EventKind::Top));
    }
    events.sort();
    let (lo, hi) = iv;
    let left_idx = events.partition_point(|e| e.0 < lo) - 1;
    let left = match events[left_idx] {
        (x, EventKind::Top) if x + 1 < lo => (x + 1, lo - 1),
        _ => (lo, lo),
    };
    let right_idx = events.partition_point(|e| e.0 <= hi);
    let right = match events[right_idx] {
        (x, EventKind::Bottom) if x > hi + 1 => (hi + 1, x - 1),
        _ => (hi, hi),
    };
    Ok((left, right))
}

/// Coverage counts over columns `1..=q` with range add and searches for
/// the first zero or first positive column.
struct Coverage {
    size: usize,
    min: Vec<i64>,
    max: Vec<i64>,
    lazy: Vec<i64>,
}

impl Coverage {
    fn new(q: usize) -> Self {
        let size = q.next_power_of_two().max(1);
        Coverage { size, min: vec![0; 2 * size], max: vec![0; 2 * size], lazy: vec![0; 2 * size] }
    }

    fn add(&mut self, l: usize, r: usize, d: i64) {
        self.add_rec(1, 1, self.size, l, r, d);
    }

    fn add_rec(&mut self, node: usize, nl: usize, nr: usize, l: usize, r: usize, d: i64) {
        if r < nl || nr < l {
            return;
        }
        if l <= nl && nr <= r {
            self.min[node] += d;
            self.max[node] += d;
            self.lazy[node] += d;
            return;
        }
        let mid = (nl + nr) / 2;
        self.add_rec(2 * node, nl, mid, l, r, d);
        self.add_rec(2 * node + 1, mid + 1, nr, l, r, d);
        self.min[node] = self.lazy[node] + self.min[2 * node].min(self.min[2 * node + 1]);
        self.max[node] = self.lazy[node] + self.max[2 * node].max(self.max[2 * node + 1]);
    }

    /// First column in `[l, r]` whose count is zero (`zero`) or positive.
    fn find(&self, l: usize, r: usize, zero: bool) -> Option<usize> {
        self.find_rec(1, 1, self.size, l, r, zero, 0)
    }

    #[allow(clippy::too_many_arguments)]
    fn find_rec(&self, node: usize, nl: usize, nr: usize, l: usize, r: usize, zero: bool, acc: i64) -> Option<usize> {
        if r < nl || nr < l {
            return None;
        }
        let (mn, mx) = (self.min[node] + acc, self.max[node] + acc);
        if (zero && mn > 0) || (!zero && mx == 0) {
            return None;
        }
        if nl == nr {
            return Some(nl);
        }
        let acc = acc + self.lazy[node];
        let mid = (nl + nr) / 2;
        self.find_rec(2 * node, nl, mid, l, r, zero, acc)
            .or_else(|| self.find_rec(2 * node + 1, mid + 1, nr, l, r, zero, acc))
    }
}

/// Boxes covering exactly the cells of `[q]^2` outside every box of the
/// space. The output boxes are pairwise disjoint. With no input boxes the
/// output is the whole grid.
pub fn cover_complement(space: &RangeSpace) -> Result<Vec<GridBox>> {
    let events = sweep_events(space)?;
    let q = space.q;
    let mut cov = Coverage::new(q);
    let mut strips: IntervalTree<usize> = IntervalTree::new();
    let mut out = Vec::new();

    let mut changes: BTreeMap<usize, Vec<(Interval, i64)>> = BTreeMap::new();
    for e in events.iter().filter(|e| e.id.is_some()) {
        let x = (e.bx.c1()[0], e.bx.c2()[0]);
        match e.kind {
            EventKind::Bottom => changes.entry(e.y).or_default().push((x, 1)),
            EventKind::Top if e.y < q => changes.entry(e.y + 1).or_default().push((x, -1)),
            EventKind::Top => {}
        }
    }
    changes.entry(1).or_default();

    for (&y, delta) in &changes {
        for &((a, b), d) in delta {
            cov.add(a, b, d);
        }
        let mut ranges: Vec<Interval> = if y == 1 { vec![(1, q)] } else { delta.iter().map(|c| c.0).collect() };
        ranges.sort();
        let mut merged: Vec<Interval> = Vec::new();
        for r in ranges {
            match merged.last_mut() {
                Some(m) if r.0 <= m.1 + 1 => m.1 = m.1.max(r.1),
                _ => merged.push(r),
            }
        }
        for (a, b) in merged {
            let probe = (a.saturating_sub(1).max(1), (b + 1).min(q));
            let (mut lo, mut hi) = (a, b);
            for ((s, t), birth) in strips.query(probe, QueryMode::Intersect) {
                strips.delete((s, t));
                if birth < y {
                    out.push(GridBox::new(vec![s, birth], vec![t, y - 1])?);
                }
                lo = lo.min(s);
                hi = hi.max(t);
            }
            let mut x = lo;
            while let Some(z) = cov.find(x, hi, true) {
                let end = cov.find(z, hi, false).map_or(hi, |p| p - 1);
                strips.insert((z, end), y)?;
                x = end + 1;
                if x > hi {
                    break;
                }
            }
        }
    }
    for ((s, t), birth) in strips.intervals() {
        out.push(GridBox::new(vec![s, birth], vec![t, q])?);
    }
    Ok(out)
}
