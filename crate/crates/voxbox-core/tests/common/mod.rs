//! Random instance generators and brute-force oracles shared by the
//! integration tests.
#![allow(dead_code)]

use num_traits::Signed;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use voxbox_core::boxgeom::GridBox;
use voxbox_core::codec::{BoxCoverSummaries, Entry};
use voxbox_core::field::VoxelField;
use voxbox_core::poly::{parse_polynomial, PiecewisePolynomial};
use voxbox_core::rational::{q, qi};
use voxbox_core::Q;

pub use rand::SeedableRng;

/// Deterministic generator for a test.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A small random rational `num / den`.
pub fn small_rational(r: &mut ChaCha8Rng, span: i64, max_den: i64) -> Q {
    q(r.gen_range(-span..=span), r.gen_range(1..=max_den))
}

/// Source text of a random polynomial in `dim` variables.
pub fn poly_source(r: &mut ChaCha8Rng, dim: usize) -> String {
    let terms = r.gen_range(1..=4);
    let mut out = Vec::new();
    for _ in 0..terms {
        let c = small_rational(r, 9, 4);
        let mut t = format!("({})", voxbox_core::rational::fmt_rational(&c));
        for _ in 0..r.gen_range(0..=2) {
            t.push_str(&format!("*x{}", r.gen_range(1..=dim)));
        }
        out.push(t);
    }
    out.join("+")
}

/// A random single-clause polynomial in `dim` variables.
pub fn random_poly(r: &mut ChaCha8Rng, dim: usize) -> PiecewisePolynomial {
    parse_polynomial(&poly_source(r, dim), dim).expect("generated polynomial parses")
}

/// A random polynomial that sometimes has a box clause and a fallback.
pub fn random_piecewise(r: &mut ChaCha8Rng, dim: usize) -> PiecewisePolynomial {
    if r.gen_bool(0.5) {
        return random_poly(r, dim);
    }
    let lo: Vec<String> = (0..dim).map(|_| r.gen_range(-3..=0).to_string()).collect();
    let hi: Vec<String> = (0..dim).map(|_| r.gen_range(1..=3).to_string()).collect();
    let src = format!(
        "dim {dim};piece box([{}],[{}]):{};else:{}",
        lo.join(","),
        hi.join(","),
        poly_source(r, dim),
        poly_source(r, dim)
    );
    parse_polynomial(&src, dim).expect("generated piecewise polynomial parses")
}

/// Cells of the grid `dims`, 1-based, row-major.
pub fn all_cells(dims: &[usize]) -> Vec<Vec<usize>> {
    let mut cells = vec![vec![]];
    for &n in dims {
        cells = cells
            .into_iter()
            .flat_map(|c| {
                (1..=n).map(move |v| {
                    let mut d = c.clone();
                    d.push(v);
                    d
                })
            })
            .collect();
    }
    cells
}

/// Row-major 0-based index of a 1-based cell.
pub fn index_of(dims: &[usize], c: &[usize]) -> usize {
    dims.iter().zip(c).fold(0, |acc, (&n, &x)| acc * n + (x - 1))
}

/// Every box of the grid `dims`.
pub fn all_boxes(dims: &[usize]) -> Vec<GridBox> {
    let cells = all_cells(dims);
    let mut out = Vec::new();
    for a in &cells {
        for b in &cells {
            if a.iter().zip(b).all(|(x, y)| x <= y) {
                out.push(GridBox::new(a.clone(), b.clone()).unwrap());
            }
        }
    }
    out
}

/// A random valid payload: random boxes, completed with unit boxes so that
/// the implied grid is covered, random summaries and parameters.
pub fn random_payload(r: &mut ChaCha8Rng) -> BoxCoverSummaries {
    let k = r.gen_range(1..=3);
    let dims: Vec<usize> = (0..k).map(|_| r.gen_range(1..=4)).collect();
    let mut boxes: Vec<GridBox> = Vec::new();
    for _ in 0..r.gen_range(0..=5) {
        let mut c1 = Vec::new();
        let mut c2 = Vec::new();
        for &n in &dims {
            let a = r.gen_range(1..=n);
            let b = r.gen_range(a..=n);
            c1.push(a);
            c2.push(b);
        }
        let b = GridBox::new(c1, c2).unwrap();
        if !boxes.contains(&b) {
            boxes.push(b);
        }
    }
    if r.gen_bool(0.9) {
        for c in all_cells(&dims) {
            if !boxes.iter().any(|b| b.contains(&c)) {
                boxes.push(GridBox::point(c));
            }
        }
    } else {
        boxes.clear();
    }
    let entries = boxes
        .into_iter()
        .map(|bx| Entry { bx, summary: small_rational(r, 400, 60) })
        .collect();
    let eps = q(r.gen_range(1..=50), r.gen_range(51..=200));
    let eps_star = &eps * q(r.gen_range(1..=9), 10);
    let d = r.gen_range(1..=3);
    let f = random_piecewise(r, d);
    BoxCoverSummaries::new(entries, eps_star, eps, f).expect("generated payload is valid")
}

/// A random field with `d`-dimensional vectors of small rationals.
pub fn random_field(r: &mut ChaCha8Rng, dims: &[usize], d: usize) -> VoxelField {
    let n: usize = dims.iter().product();
    let data = (0..n).map(|_| (0..d).map(|_| small_rational(r, 12, 4)).collect()).collect();
    VoxelField::with_hull(dims.to_vec(), d, data).expect("generated field is valid")
}

/// Largest pairwise gap strictly below `bound`, by checking all pairs.
pub fn largest_gap_below(values: &[Q], bound: &Q) -> Option<Q> {
    let mut best: Option<Q> = None;
    for (i, a) in values.iter().enumerate() {
        for b in &values[i + 1..] {
            let g = (a - b).abs();
            if &g < bound && best.as_ref().is_none_or(|x| &g > x) {
                best = Some(g);
            }
        }
    }
    best
}

/// Tolerance parameter chosen from the pairwise gaps, computed from scratch.
pub fn oracle_eps_star(values: &[Q], eps: &Q) -> Q {
    match largest_gap_below(values, &(eps * qi(2))) {
        Some(g) if g > qi(0) => g / qi(2),
        _ => eps / qi(2),
    }
}

/// Spread of the values at `idx`.
pub fn spread(values: &[Q], idx: &[usize]) -> Q {
    let max = idx.iter().map(|&i| &values[i]).max().unwrap();
    let min = idx.iter().map(|&i| &values[i]).min().unwrap();
    max - min
}

/// Minimum number of sets covering `0..n` by depth-first search on the
/// first uncovered element; `None` when no cover exists.
pub fn min_cover(n: usize, sets: &[Vec<usize>]) -> Option<usize> {
    let mut by_elem: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (s, set) in sets.iter().enumerate() {
        for &e in set {
            by_elem[e].push(s);
        }
    }
    if by_elem.iter().any(|v| v.is_empty()) {
        return None;
    }
    let mut count = vec![0u32; n];
    let mut best = n + 1;
    fn go(depth: usize, count: &mut [u32], sets: &[Vec<usize>], by_elem: &[Vec<usize>], best: &mut usize) {
        if depth + 1 > *best {
            return;
        }
        let Some(e) = count.iter().position(|&c| c == 0) else {
            *best = depth;
            return;
        };
        if depth + 1 >= *best {
            return;
        }
        for &s in &by_elem[e] {
            for &x in &sets[s] {
                count[x] += 1;
            }
            go(depth + 1, count, sets, by_elem, best);
            for &x in &sets[s] {
                count[x] -= 1;
            }
        }
    }
    go(0, &mut count, sets, &by_elem, &mut best);
    Some(best)
}

/// Cell indices of a box on the grid `dims`.
pub fn box_cells(dims: &[usize], b: &GridBox) -> Vec<usize> {
    b.cells().iter().map(|c| index_of(dims, c)).collect()
}
