//! Axis-aligned boxes on voxel grids, rational boxes in the plane, and the
//! order-preserving embeddings of interval and box collections into `[2N]`.

use crate::error::{Error, Result};
use crate::rational::Q;
use std::fmt;

/// A closed box of grid voxels given by its minimum corner `c1` and maximum
/// corner `c2` (1-based, inclusive).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GridBox {
    c1: Vec<usize>,
    c2: Vec<usize>,
}

impl GridBox {
    /// Builds a box; requires `1 <= c1 <= c2` coordinatewise.
    pub fn new(c1: Vec<usize>, c2: Vec<usize>) -> Result<Self> {
        if c1.len() != c2.len() {
            return Err(Error::DimensionMismatch("box corners differ in length".into()));
        }
        if c1.iter().zip(&c2).any(|(a, b)| *a < 1 || a > b) {
            return Err(Error::InvalidArgument(format!("box corners {c1:?} {c2:?} are not ordered 1-based")));
        }
        Ok(GridBox { c1, c2 })
    }

    /// The single-voxel box at `c`.
    pub fn point(c: Vec<usize>) -> Self {
        GridBox { c1: c.clone(), c2: c }
    }

    /// Minimum corner.
    pub fn c1(&self) -> &[usize] {
        &self.c1
    }

    /// Maximum corner.
    pub fn c2(&self) -> &[usize] {
        &self.c2
    }

    /// Grid dimension `k`.
    pub fn k(&self) -> usize {
        self.c1.len()
    }

    /// Number of axes along which the box spans more than one voxel.
    pub fn dim(&self) -> usize {
        self.c1.iter().zip(&self.c2).filter(|(a, b)| a != b).count()
    }

    /// Number of voxels.
    pub fn volume(&self) -> usize {
        self.c1.iter().zip(&self.c2).map(|(a, b)| b - a + 1).product()
    }

    /// Membership of a 1-based coordinate.
    pub fn contains(&self, c: &[usize]) -> bool {
        c.iter().zip(self.c1.iter().zip(&self.c2)).all(|(x, (a, b))| a <= x && x <= b)
    }

    /// True when the two boxes share a voxel.
    pub fn intersects(&self, o: &GridBox) -> bool {
        (0..self.k()).all(|j| self.c1[j] <= o.c2[j] && o.c1[j] <= self.c2[j])
    }

    /// True when every voxel of `self` lies in `o`.
    pub fn is_subset_of(&self, o: &GridBox) -> bool {
        o.contains(&self.c1) && o.contains(&self.c2)
    }

    /// True when the box fits inside the grid with extents `dims`.
    pub fn fits(&self, dims: &[usize]) -> bool {
        self.k() == dims.len() && self.c2.iter().zip(dims).all(|(b, n)| b <= n)
    }

    /// The extreme points: every choice of min or max per axis, without
    /// repeats along degenerate axes.
    pub fn corners(&self) -> Vec<Vec<usize>> {
        let mut out: Vec<Vec<usize>> = vec![Vec::new()];
        for j in 0..self.k() {
            let choices: Vec<usize> =
                if self.c1[j] == self.c2[j] { vec![self.c1[j]] } else { vec![self.c1[j], self.c2[j]] };
            out = out
                .into_iter()
                .flat_map(|p| {
                    choices.iter().map(move |&c| {
                        let mut q = p.clone();
                        q.push(c);
                        q
                    })
                })
                .collect();
        }
        out
    }

    /// Every voxel of the box in row-major order.
    pub fn cells(&self) -> Vec<Vec<usize>> {
        let mut out = vec![self.c1.clone()];
        for j in 0..self.k() {
            out = out
                .into_iter()
                .flat_map(|p| {
                    (self.c1[j]..=self.c2[j]).map(move |c| {
                        let mut q = p.clone();
                        q[j] = c;
                        q
                    })
                })
                .collect();
        }
        out
    }
}

impl fmt::Display for GridBox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let iv: Vec<String> = self.c1.iter().zip(&self.c2).map(|(a, b)| format!("[{a},{b}]")).collect();
        f.write_str(&iv.join("x"))
    }
}

/// Smallest box containing every point.
pub fn bounding_box(points: &[Vec<usize>]) -> Result<GridBox> {
    let first = points.first().ok_or_else(|| Error::InvalidArgument("bounding box of an empty set".into()))?;
    let mut c1 = first.clone();
    let mut c2 = first.clone();
    for p in points {
        if p.len() != c1.len() {
            return Err(Error::DimensionMismatch("points differ in dimension".into()));
        }
        for j in 0..p.len() {
            c1[j] = c1[j].min(p[j]);
            c2[j] = c2[j].max(p[j]);
        }
    }
    GridBox::new(c1, c2)
}

/// Convex corners of `b` inside a grid of extents `dims`, found from the
/// definition: a voxel `x` of `b` is a convex corner when exactly one diagonal
/// step `x + sum v_q e_q` (over the non-degenerate axes, `v_q = +-1`) lands on a
/// grid voxel `y` with the bounding box of `{x, y}` inside `b`.
pub fn convex_corners(b: &GridBox, dims: &[usize]) -> Vec<Vec<usize>> {
    let axes: Vec<usize> = (0..b.k()).filter(|&j| b.c1[j] != b.c2[j]).collect();
    let mut out = Vec::new();
    for x in b.cells() {
        let mut witnesses = 0;
        for mask in 0..(1usize << axes.len()) {
            let mut y: Vec<i64> = x.iter().map(|&c| c as i64).collect();
            for (t, &q) in axes.iter().enumerate() {
                y[q] += if mask >> t & 1 == 1 { 1 } else { -1 };
            }
            let in_grid = y.iter().zip(dims).all(|(&c, &n)| c >= 1 && c as usize <= n);
            if in_grid {
                let y: Vec<usize> = y.iter().map(|&c| c as usize).collect();
                let bb = bounding_box(&[x.clone(), y]).expect("two points");
                if bb.is_subset_of(b) {
                    witnesses += 1;
                }
            }
        }
        if witnesses == 1 {
            out.push(x);
        }
    }
    out
}

/// Voxels of `b` minimizing the largest coordinate over the box's axes,
/// and voxels maximizing the smallest; returned as (minimax set, maximin set).
pub fn extremal_corner_sets(b: &GridBox) -> (Vec<Vec<usize>>, Vec<Vec<usize>>) {
    let axes: Vec<usize> = (0..b.k()).filter(|&j| b.c1[j] != b.c2[j]).collect();
    let cells = b.cells();
    let key_max = |x: &Vec<usize>| axes.iter().map(|&q| x[q]).max().unwrap_or(0);
    let key_min = |x: &Vec<usize>| axes.iter().map(|&q| x[q]).min().unwrap_or(0);
    let lo = cells.iter().map(key_max).min().unwrap_or(0);
    let hi = cells.iter().map(key_min).max().unwrap_or(0);
    (
        cells.iter().filter(|x| key_max(x) == lo).cloned().collect(),
        cells.iter().filter(|x| key_min(x) == hi).cloned().collect(),
    )
}

/// Subcollection of boxes none of whose corners lies in a different box.
/// Exact duplicates are kept once.
pub fn maximal_corner_subcover(boxes: &[GridBox]) -> Vec<GridBox> {
    let mut out: Vec<GridBox> = Vec::new();
    for (i, b) in boxes.iter().enumerate() {
        if boxes[..i].contains(b) {
            continue;
        }
        let covered = b
            .corners()
            .iter()
            .any(|c| boxes.iter().enumerate().any(|(j, o)| j != i && o != b && o.contains(c)));
        if !covered {
            out.push(b.clone());
        }
    }
    out
}

/// A closed box with rational corners in `R^k`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RatBox {
    pub lo: Vec<Q>,
    pub hi: Vec<Q>,
}

impl RatBox {
    /// Builds a box; requires `lo <= hi` coordinatewise.
    pub fn new(lo: Vec<Q>, hi: Vec<Q>) -> Result<Self> {
        if lo.len() != hi.len() {
            return Err(Error::DimensionMismatch("box corners differ in length".into()));
        }
        if lo.iter().zip(&hi).any(|(a, b)| a > b) {
            return Err(Error::InvalidArgument("box lower corner exceeds upper corner".into()));
        }
        Ok(RatBox { lo, hi })
    }

    /// Membership of a rational point.
    pub fn contains(&self, p: &[Q]) -> bool {
        p.iter().zip(self.lo.iter().zip(&self.hi)).all(|(x, (a, b))| a <= x && x <= b)
    }
}

/// How two planar boxes meet.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairRelation {
    /// No common point.
    Disjoint,
    /// Each spans the other along one axis; the boundaries meet in 4 points.
    Cross,
    /// One lies in the interior of the other; the boundaries do not meet.
    Nested,
    /// Any other contact (shared edges, corner overlaps, touching).
    Other,
}

/// Classifies two boxes given as per-axis closed intervals `(lo, hi)`.
pub fn pair_relation<T: Ord>(a: &[(T, T)], b: &[(T, T)]) -> PairRelation {
    let disjoint = a.iter().zip(b).any(|(x, y)| x.1 < y.0 || y.1 < x.0);
    if disjoint {
        return PairRelation::Disjoint;
    }
    let inside = |x: &(T, T), y: &(T, T)| y.0 < x.0 && x.1 < y.1;
    if a.iter().zip(b).all(|(x, y)| inside(x, y)) || a.iter().zip(b).all(|(x, y)| inside(y, x)) {
        return PairRelation::Nested;
    }
    if a.len() == 2 {
        let (ax, ay, bx, by) = (&a[0], &a[1], &b[0], &b[1]);
        if (inside(bx, ax) && inside(ay, by)) || (inside(ax, bx) && inside(by, ay)) {
            return PairRelation::Cross;
        }
    }
    PairRelation::Other
}

/// Boundary intersection count implied by a relation: 4 for crossings, 0 for
/// disjoint or nested pairs, `None` for any other contact.
pub fn boundary_points(rel: PairRelation) -> Option<usize> {
    match rel {
        PairRelation::Cross => Some(4),
        PairRelation::Disjoint | PairRelation::Nested => Some(0),
        PairRelation::Other => None,
    }
}

/// Order-preserving map of a finite set of rationals onto `1..=|S|`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntervalEmbedding {
    breakpoints: Vec<Q>,
}

impl IntervalEmbedding {
    /// Sorted distinct breakpoints.
    pub fn breakpoints(&self) -> &[Q] {
        &self.breakpoints
    }

    /// Rank (1-based) of a breakpoint.
    pub fn rank(&self, s: &Q) -> Option<usize> {
        self.breakpoints.binary_search(s).ok().map(|i| i + 1)
    }

    /// Piecewise-linear extension: breakpoint `j` maps to `j`, values in
    /// between interpolate, values outside extend with unit slope.
    pub fn apply(&self, s: &Q) -> Q {
        let bp = &self.breakpoints;
        let one = Q::from_integer(1.into());
        match bp.binary_search(s) {
            Ok(i) => Q::from_integer((i + 1).into()),
            Err(0) => one - (&bp[0] - s),
            Err(i) if i == bp.len() => Q::from_integer(bp.len().into()) + (s - &bp[i - 1]),
            Err(i) => {
                let (a, b) = (&bp[i - 1], &bp[i]);
                Q::from_integer(i.into()) + (s - a) / (b - a)
            }
        }
    }
}

/// Maps interval endpoints to their ranks among all distinct endpoints.
pub fn embed_intervals(intervals: &[(Q, Q)]) -> Result<(IntervalEmbedding, Vec<(usize, usize)>)> {
    if let Some((a, b)) = intervals.iter().find(|(a, b)| a > b) {
        return Err(Error::InvalidArgument(format!("interval [{a}, {b}] is reversed")));
    }
    let mut bp: Vec<Q> = intervals.iter().flat_map(|(a, b)| [a.clone(), b.clone()]).collect();
    bp.sort();
    bp.dedup();
    let emb = IntervalEmbedding { breakpoints: bp };
    let mapped = intervals
        .iter()
        .map(|(a, b)| (emb.rank(a).expect("endpoint is a breakpoint"), emb.rank(b).expect("endpoint is a breakpoint")))
        .collect();
    Ok((emb, mapped))
}

/// A collection of integer boxes on the grid `[q]^k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RangeSpace {
    pub k: usize,
    pub q: usize,
    pub boxes: Vec<GridBox>,
}

impl RangeSpace {
    /// Builds a range space, checking every box lies in `[q]^k`.
    pub fn new(k: usize, q: usize, boxes: Vec<GridBox>) -> Result<Self> {
        for b in &boxes {
            if b.k() != k || b.c2.iter().any(|&c| c > q) {
                return Err(Error::IndexOutOfRange(format!("box {b} outside grid [{q}]^{k}")));
            }
        }
        Ok(RangeSpace { k, q, boxes })
    }

    /// Grid extents `[q; k]`.
    pub fn dims(&self) -> Vec<usize> {
        vec![self.q; self.k]
    }

    /// Per-voxel coverage flags in row-major order.
    pub fn coverage(&self) -> Vec<bool> {
        rasterize(&self.dims(), &self.boxes)
    }

    /// Text form: `RS k q m` then one box per line, `c1...` followed by `c2...`.
    pub fn to_text(&self) -> String {
        let mut s = format!("RS {} {} {}\n", self.k, self.q, self.boxes.len());
        for b in &self.boxes {
            let nums: Vec<String> = b.c1.iter().chain(&b.c2).map(|c| c.to_string()).collect();
            s.push_str(&nums.join(" "));
            s.push('\n');
        }
        s
    }

    /// Parses the text form; `#` lines are comments.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let syntax = |line: usize, msg: &str| Error::Syntax { pos: line, msg: format!("line {line}: {msg}") };
        let (ln, header) = lines.next().ok_or_else(|| syntax(0, "missing RS header"))?;
        let h: Vec<&str> = header.split_whitespace().collect();
        if h.len() != 4 || h[0] != "RS" {
            return Err(syntax(ln, "header must read 'RS k q m'"));
        }
        let nat = |ln: usize, s: &str| s.parse::<usize>().map_err(|_| syntax(ln, "expected a natural number"));
        let (k, q, m) = (nat(ln, h[1])?, nat(ln, h[2])?, nat(ln, h[3])?);
        let mut boxes = Vec::with_capacity(m);
        for _ in 0..m {
            let (ln, l) = lines.next().ok_or_else(|| syntax(0, "fewer boxes than declared"))?;
            let v = l.split_whitespace().map(|s| nat(ln, s)).collect::<Result<Vec<_>>>()?;
            if v.len() != 2 * k {
                return Err(syntax(ln, "box line must hold 2k coordinates"));
            }
            boxes.push(GridBox::new(v[..k].to_vec(), v[k..].to_vec()).map_err(|e| syntax(ln, &e.to_string()))?);
        }
        if let Some((ln, _)) = lines.next() {
            return Err(syntax(ln, "more boxes than declared"));
        }
        Self::new(k, q, boxes)
    }
}

/// Coverage flags of a box collection on a grid, in row-major order.
pub fn rasterize(dims: &[usize], boxes: &[GridBox]) -> Vec<bool> {
    let mut cov = vec![false; crate::field::grid_len(dims)];
    for b in boxes {
        for c in b.cells() {
            cov[crate::field::flat0(dims, &c)] = true;
        }
    }
    cov
}

/// Embeds rational boxes into `[2N]^k` by ranking endpoints per axis.
pub fn embed_boxes(boxes: &[RatBox]) -> Result<(Vec<IntervalEmbedding>, RangeSpace)> {
    let first = boxes.first().ok_or_else(|| Error::InvalidArgument("no boxes to embed".into()))?;
    let k = first.lo.len();
    if boxes.iter().any(|b| b.lo.len() != k) {
        return Err(Error::DimensionMismatch("boxes differ in dimension".into()));
    }
    let mut embs = Vec::with_capacity(k);
    let mut per_axis = Vec::with_capacity(k);
    for j in 0..k {
        let iv: Vec<(Q, Q)> = boxes.iter().map(|b| (b.lo[j].clone(), b.hi[j].clone())).collect();
        let (e, m) = embed_intervals(&iv)?;
        embs.push(e);
        per_axis.push(m);
    }
    let grid = boxes
        .iter()
        .enumerate()
        .map(|(i, _)| GridBox::new((0..k).map(|j| per_axis[j][i].0).collect(), (0..k).map(|j| per_axis[j][i].1).collect()))
        .collect::<Result<Vec<_>>>()?;
    let rs = RangeSpace::new(k, 2 * boxes.len(), grid)?;
    Ok((embs, rs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qi};

    fn gb(c1: &[usize], c2: &[usize]) -> GridBox {
        GridBox::new(c1.to_vec(), c2.to_vec()).unwrap()
    }

    #[test]
    fn bounding_boxes() {
        assert_eq!(bounding_box(&[vec![1, 1]]).unwrap(), gb(&[1, 1], &[1, 1]));
        assert_eq!(bounding_box(&[vec![1, 3], vec![2, 1]]).unwrap(), gb(&[1, 1], &[2, 3]));
        let sq = vec![vec![1, 1], vec![2, 2], vec![1, 2], vec![2, 1]];
        let bb = bounding_box(&sq).unwrap();
        assert_eq!(bb, gb(&[1, 1], &[2, 2]));
        assert_eq!(bb.cells().len(), sq.len());
        assert!(bounding_box(&[]).is_err());
    }

    #[test]
    fn interval_embedding_examples() {
        let (e, m) = embed_intervals(&[(q(1, 2), q(27, 10)), (q(11, 10), q(39, 10))]).unwrap();
        assert_eq!(e.breakpoints(), &[q(1, 2), q(11, 10), q(27, 10), q(39, 10)]);
        assert_eq!(m, vec![(1, 3), (2, 4)]);
        let (_, m) = embed_intervals(&[(qi(5), qi(9))]).unwrap();
        assert_eq!(m, vec![(1, 2)]);
        let (_, m) = embed_intervals(&[(qi(0), qi(1)), (qi(1), qi(2))]).unwrap();
        assert_eq!(m, vec![(1, 2), (2, 3)]);
        assert_eq!(e.apply(&q(4, 5)), q(3, 2));
    }

    #[test]
    fn embedding_preserves_relations() {
        let unit = |x: i64, y: i64| RatBox::new(vec![qi(x), qi(y)], vec![qi(x + 1), qi(y + 1)]).unwrap();
        let (_, rs) = embed_boxes(&[unit(0, 0), unit(5, 5)]).unwrap();
        assert_eq!(rs.q, 4);
        assert!(!rs.boxes[0].intersects(&rs.boxes[1]));

        let wide = RatBox::new(vec![qi(0), qi(1)], vec![qi(4), qi(2)]).unwrap();
        let tall = RatBox::new(vec![qi(1), qi(0)], vec![qi(2), qi(4)]).unwrap();
        let (_, rs) = embed_boxes(&[wide, tall]).unwrap();
        let iv = |b: &GridBox| vec![(b.c1()[0], b.c2()[0]), (b.c1()[1], b.c2()[1])];
        assert_eq!(pair_relation(&iv(&rs.boxes[0]), &iv(&rs.boxes[1])), PairRelation::Cross);

        let outer = RatBox::new(vec![qi(0), qi(0)], vec![qi(9), qi(9)]).unwrap();
        let inner = RatBox::new(vec![qi(3), qi(3)], vec![qi(4), qi(4)]).unwrap();
        let (_, rs) = embed_boxes(&[outer, inner]).unwrap();
        assert!(rs.boxes[1].is_subset_of(&rs.boxes[0]));
    }

    #[test]
    fn subcover_examples() {
        let a = gb(&[1, 1], &[2, 2]);
        let b = gb(&[4, 4], &[5, 5]);
        assert_eq!(maximal_corner_subcover(&[a.clone(), b.clone()]), vec![a, b]);
        let big = gb(&[1, 1], &[6, 6]);
        let small = gb(&[2, 2], &[3, 3]);
        assert_eq!(maximal_corner_subcover(&[small, big.clone()]), vec![big]);
        let wide = gb(&[1, 3], &[7, 4]);
        let tall = gb(&[3, 1], &[4, 7]);
        assert_eq!(maximal_corner_subcover(&[wide.clone(), tall.clone()]), vec![wide, tall]);
    }

    #[test]
    fn corners_of_boxes() {
        let b = gb(&[2, 2, 2], &[3, 4, 2]);
        assert_eq!(b.dim(), 2);
        let mut c = convex_corners(&b, &[4, 4, 4]);
        c.sort();
        let mut expect = b.corners();
        expect.sort();
        assert_eq!(c, expect);
        assert_eq!(c.len(), 4);
    }

    #[test]
    fn range_space_text_roundtrip() {
        let rs = RangeSpace::new(2, 4, vec![gb(&[2, 2], &[3, 3])]).unwrap();
        assert_eq!(rs.to_text(), "RS 2 4 1\n2 2 3 3\n");
        assert_eq!(RangeSpace::from_text(&rs.to_text()).unwrap(), rs);
        assert!(RangeSpace::from_text("RS 2 4 1\n2 2 5 3\n").is_err());
        assert!(RangeSpace::from_text("RS 2 4 2\n2 2 3 3\n").is_err());
    }
}
