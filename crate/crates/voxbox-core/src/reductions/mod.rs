//! Generators for the hardness-reduction instances: rectangle cover of a
//! binary matrix as a compression instance, the planar embedding of
//! Special-3SC set systems, their voxel-grid version with the complement
//! cover, and the compression instance built from a voxel-grid instance.

mod special;

pub use special::{Elem, Special3SC};

use crate::boxgeom::{embed_boxes, pair_relation, GridBox, PairRelation, RangeSpace, RatBox};
use crate::codec::{entry_cost, function_bit_len, rational_bit_len, R};
use crate::error::{Error, Result};
use crate::field::{grid_len, VoxelField};
use crate::poly::{parse_polynomial, PiecewisePolynomial};
use crate::rational::{bit_len, q, qi, Q};
use crate::sweepline::cover_complement;
use num_bigint::BigInt;
use std::fmt;

/// Square 0-1 matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryMatrix {
    m: usize,
    cells: Vec<bool>,
}

impl BinaryMatrix {
    /// Builds an `m x m` matrix from row-major cells.
    pub fn new(m: usize, cells: Vec<bool>) -> Result<Self> {
        if m == 0 || cells.len() != m * m {
            return Err(Error::DimensionMismatch(format!("{} cells for a {m} x {m} matrix", cells.len())));
        }
        Ok(BinaryMatrix { m, cells })
    }

    /// Parses rows of `0`/`1` characters.
    pub fn from_rows(rows: &[&str]) -> Result<Self> {
        let m = rows.len();
        let mut cells = Vec::with_capacity(m * m);
        for r in rows {
            if r.len() != m {
                return Err(Error::DimensionMismatch(format!("row {r:?} does not have {m} cells")));
            }
            for c in r.chars() {
                match c {
                    '0' => cells.push(false),
                    '1' => cells.push(true),
                    _ => return Err(Error::InvalidArgument(format!("matrix cell {c:?} is not 0 or 1"))),
                }
            }
        }
        Self::new(m, cells)
    }

    /// The 5 x 5 plus-shaped example with a hole.
    pub fn fig3() -> Self {
        Self::from_rows(&["00110", "11111", "10100", "11111", "00110"]).expect("valid rows")
    }

    /// Side length.
    pub fn m(&self) -> usize {
        self.m
    }

    /// Cell `(j, k)`, 1-based.
    pub fn get(&self, j: usize, k: usize) -> bool {
        self.cells[(j - 1) * self.m + (k - 1)]
    }

    /// Row-major cells.
    pub fn cells(&self) -> &[bool] {
        &self.cells
    }

    /// Number of ones.
    pub fn nnz(&self) -> usize {
        self.cells.iter().filter(|&&c| c).count()
    }

    /// Injective label `m j + k` of cell `(j, k)`.
    pub fn eta(&self, j: usize, k: usize) -> usize {
        self.m * j + k
    }
}

impl fmt::Display for BinaryMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in self.cells.chunks(self.m) {
            let s: String = row.iter().map(|&c| if c { '1' } else { '0' }).collect();
            writeln!(f, "{s}")?;
        }
        Ok(())
    }
}

/// A compression instance encoding a rectangle-cover question.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NpInstance {
    pub field: VoxelField,
    pub f: PiecewisePolynomial,
    pub eps: Q,
    /// Codeword length bound matching the rectangle budget.
    pub k_bits: usize,
}

/// Builds the compression instance of a binary matrix: voxel `(j, k)` holds
/// the scalar `eta(j, k)`, the energy is `1` on the ones and `-eta` on the
/// zeros, `eps = 1/10`, and `k_bits` is the codeword length of a cover that
/// uses `k_prime` boxes on the ones and one box per zero.
pub fn build_np_instance(mat: &BinaryMatrix, k_prime: usize) -> Result<NpInstance> {
    let m = mat.m();
    if k_prime > m * m {
        return Err(Error::InvalidArgument(format!("rectangle budget {k_prime} exceeds {} cells", m * m)));
    }
    let mut data = Vec::with_capacity(m * m);
    let mut ones = Vec::new();
    for j in 1..=m {
        for k in 1..=m {
            let e = mat.eta(j, k);
            data.push(vec![qi(e as i64)]);
            if mat.get(j, k) {
                ones.push(e.to_string());
            }
        }
    }
    let src = if ones.is_empty() {
        "dim 1;-x1".to_string()
    } else {
        format!("dim 1;piece values(x1,[{}]):1;else:-x1", ones.join(","))
    };
    let f = parse_polynomial(&src, 1)?;
    let field = VoxelField::with_hull(vec![m, m], 1, data)?;
    let eps = q(1, 10);
    let eps_star = q(1, 20);
    let zeros = m * m - mat.nnz();
    let mut width = 1;
    for j in 1..=m {
        for k in 1..=m {
            if !mat.get(j, k) {
                width = width.max(bit_len(&BigInt::from(mat.eta(j, k))));
            }
        }
    }
    let k_bits = (k_prime + zeros) * entry_cost(2, m * m, width)
        + 5 * R
        + rational_bit_len(&eps_star)
        + rational_bit_len(&eps)
        + function_bit_len(&f);
    Ok(NpInstance { field, f, eps, k_bits })
}

/// Planar image of a Special-3SC instance: labelled points and one box per set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhiEmbedding {
    pub points: Vec<(Elem, Vec<Q>)>,
    pub boxes: Vec<RatBox>,
}

impl PhiEmbedding {
    /// Indices of the points inside box `b`.
    pub fn points_in(&self, b: usize) -> Vec<usize> {
        (0..self.points.len()).filter(|&p| self.boxes[b].contains(&self.points[p].1)).collect()
    }

    /// True when every pair of boxes crosses or is disjoint.
    pub fn crossing_or_disjoint(&self) -> bool {
        let iv = |b: &RatBox| vec![(b.lo[0].clone(), b.hi[0].clone()), (b.lo[1].clone(), b.hi[1].clone())];
        self.boxes.iter().enumerate().all(|(i, a)| {
            self.boxes[i + 1..]
                .iter()
                .all(|b| matches!(pair_relation(&iv(a), &iv(b)), PairRelation::Cross | PairRelation::Disjoint))
        })
    }
}

/// Height of the `r`-th element of `B` in the order `w_1 < x_1 < y_1 < z_1 < w_2 < ...`.
fn level(r: usize) -> Q {
    qi(4 * r as i64 + 4)
}

/// Embeds an instance in the plane. `a_i` sits at `(2i, 1)`; the elements of
/// `B` sit on increasing heights, each in the column of the `a` whose set
/// holds it. Each `a_i` has a wide and a narrow vertical box (one per set,
/// the earlier set wide); the narrow one starts lower and ends higher, so the
/// two cross. The two pair sets of each group are horizontal boxes spanning
/// their columns, crossed by every vertical box they meet.
pub fn phi_embed(inst: &Special3SC) -> Result<PhiEmbedding> {
    inst.validate()?;
    let h = qi(1);
    let delta = q(1, 2);
    let col = |i: usize| qi(2 * i as i64);
    let mut first_use = vec![None; inst.n() + 1];
    for (t, tri) in inst.triples().iter().enumerate() {
        for &a in tri {
            if first_use[a].is_none() {
                first_use[a] = Some(t);
            }
        }
    }
    let wide = |a: usize, t: usize| first_use[a] == Some(t);
    let b_x = |a: usize, t: usize| if wide(a, t) { col(a) + q(3, 8) } else { col(a) };
    let leg = |a: usize, t: usize, top: Q| -> Result<RatBox> {
        let (half, bottom) = if wide(a, t) { (q(1, 2), q(3, 4)) } else { (q(1, 4), q(1, 2)) };
        RatBox::new(vec![col(a) - &half, bottom], vec![col(a) + half, top])
    };
    let mut points: Vec<(Elem, Vec<Q>)> = (1..=inst.n()).map(|i| (Elem::A(i), vec![col(i), qi(1)])).collect();
    let mut boxes = Vec::with_capacity(5 * inst.m());
    for (t0, &[i, j, k]) in inst.triples().iter().enumerate() {
        let t = t0 + 1;
        let (lw, lx, ly, lz) = (level(4 * t0), level(4 * t0 + 1), level(4 * t0 + 2), level(4 * t0 + 3));
        points.push((Elem::W(t), vec![b_x(i, t0), lw.clone()]));
        points.push((Elem::X(t), vec![b_x(j, t0), lx.clone()]));
        points.push((Elem::Y(t), vec![b_x(j, t0), ly.clone()]));
        points.push((Elem::Z(t), vec![b_x(k, t0), lz.clone()]));
        let span = |a: usize, b: usize, lo: &Q, hi: &Q| {
            RatBox::new(vec![col(a) - q(5, 8), lo - &h], vec![col(b) + q(5, 8), hi + &h])
        };
        boxes.push(leg(i, t0, &lx + &h + &delta)?);
        boxes.push(span(i, j, &lw, &lx)?);
        boxes.push(leg(j, t0, &lz + &h + &delta)?);
        boxes.push(span(j, k, &ly, &lz)?);
        boxes.push(leg(k, t0, &lz + &h + &delta)?);
    }
    Ok(PhiEmbedding { points, boxes })
}

/// Origin of a box in a voxel-grid instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Tag {
    /// Embedded image of the set with this index.
    Original(usize),
    /// Part of the complement cover.
    Complement,
}

/// Embedded boxes on `[q]^2` with the complement cover of their union.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VGridInstance {
    pub q: usize,
    pub boxes: Vec<GridBox>,
    pub tags: Vec<Tag>,
}

impl VGridInstance {
    /// The embedded original boxes.
    pub fn originals(&self) -> Vec<GridBox> {
        self.select(|t| matches!(t, Tag::Original(_)))
    }

    /// The complement boxes.
    pub fn complement(&self) -> Vec<GridBox> {
        self.select(|t| *t == Tag::Complement)
    }

    fn select(&self, keep: impl Fn(&Tag) -> bool) -> Vec<GridBox> {
        self.boxes.iter().zip(&self.tags).filter(|(_, t)| keep(t)).map(|(b, _)| b.clone()).collect()
    }

    /// As a range space.
    pub fn range_space(&self) -> RangeSpace {
        RangeSpace { k: 2, q: self.q, boxes: self.boxes.clone() }
    }

    /// Set indices of the original boxes among the chosen box indices,
    /// dropping complement boxes.
    pub fn extract_sets(&self, chosen: &[usize]) -> Vec<usize> {
        chosen
            .iter()
            .filter_map(|&b| match self.tags.get(b) {
                Some(Tag::Original(s)) => Some(*s),
                _ => None,
            })
            .collect()
    }

    /// Checks `|cover| >= |originals| / 3 + |complement|` for a cover of the
    /// whole grid; fails when the boxes leave a cell uncovered.
    pub fn check_lower_bound(&self, cover: &[GridBox]) -> Result<bool> {
        let dims = [self.q, self.q];
        if cover.iter().any(|b| !b.fits(&dims)) {
            return Err(Error::InvalidArgument("a cover box leaves the grid".into()));
        }
        if crate::boxgeom::rasterize(&dims, cover).iter().any(|c| !c) {
            return Err(Error::InvalidArgument("the boxes do not cover the grid".into()));
        }
        let originals = self.tags.iter().filter(|t| matches!(t, Tag::Original(_))).count();
        let complement = self.tags.len() - originals;
        Ok(3 * cover.len() >= originals + 3 * complement)
    }
}

/// Embeds the planar boxes into `[2N]^2` and adds the complement cover.
pub fn build_vgrid_instance(phi: &PhiEmbedding) -> Result<VGridInstance> {
    let (_, rs) = embed_boxes(&phi.boxes)?;
    let h = cover_complement(&rs)?;
    let mut tags: Vec<Tag> = (0..rs.boxes.len()).map(Tag::Original).collect();
    tags.extend(std::iter::repeat_n(Tag::Complement, h.len()));
    let mut boxes = rs.boxes;
    boxes.extend(h);
    Ok(VGridInstance { q: rs.q, boxes, tags })
}

/// A compression instance built from a voxel-grid instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ApxInstance {
    pub field: VoxelField,
    pub f: PiecewisePolynomial,
    pub eps: Q,
    /// Approximation-scheme scaling `alpha(eps) = eps / 13`.
    pub alpha: Q,
}

/// The identity field on `[q]^2` (voxel `(i, j)` holds the vector `(i, j)`)
/// with an energy that gives every box meeting no other box its own positive
/// integer and is `0` elsewhere; `eps = 1/10`.
pub fn build_apx_instance(inst: &VGridInstance) -> Result<ApxInstance> {
    let q_side = inst.q;
    let dims = vec![q_side, q_side];
    let data: Vec<Vec<Q>> = (0..grid_len(&dims))
        .map(|i| {
            let c = crate::field::coord0(&dims, i);
            vec![qi(c[0] as i64), qi(c[1] as i64)]
        })
        .collect();
    let field = VoxelField::with_hull(dims, 2, data)?;
    let mut clauses = Vec::new();
    let mut next = 1;
    for (a, b) in inst.boxes.iter().enumerate() {
        let alone = inst.boxes.iter().enumerate().all(|(o, c)| o == a || !b.intersects(c));
        if alone {
            let v = |c: &[usize]| c.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
            clauses.push(format!("piece box([{}],[{}]):{next}", v(b.c1()), v(b.c2())));
            next += 1;
        }
    }
    clauses.push("else:0".into());
    let f = parse_polynomial(&format!("dim 2;{}", clauses.join(";")), 2)?;
    let eps = q(1, 10);
    let alpha = &eps / qi(13);
    Ok(ApxInstance { field, f, eps, alpha })
}
