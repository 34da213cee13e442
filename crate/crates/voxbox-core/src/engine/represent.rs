//! Search for a rational point whose energy is close to a target value.

use crate::codec::rational_bit_len;
use crate::poly::{CoordConstraint, PiecewisePolynomial};
use crate::rational::{midpoint, Q};
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Effort limits of the representative search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchLimits {
    /// Pseudo-random probes per clause.
    pub random_probes: usize,
    /// Sign-change brackets bisected per clause and stage.
    pub max_brackets: usize,
    /// Most values tried per coordinate on value sets and small grids.
    pub values_per_axis: usize,
    /// Moves of the final pattern search.
    pub pattern_moves: usize,
}

impl Default for SearchLimits {
    fn default() -> Self {
        SearchLimits { random_probes: 256, max_brackets: 32, values_per_axis: 9, pattern_moves: 4000 }
    }
}

struct Ctx<'a> {
    f: &'a PiecewisePolynomial,
    target: &'a Q,
    tol: &'a Q,
    cap: usize,
    best: Option<(Q, Vec<Q>)>,
}

impl Ctx<'_> {
    /// Gap `f(x) - target` when clause `piece` is the active one at `x`.
    fn gap_on(&mut self, piece: usize, x: &[Q]) -> Option<Q> {
        if self.f.active_piece(x) != Some(piece) {
            return None;
        }
        let g = self.f.pieces()[piece].eval_terms(x) - self.target;
        let a = g.abs();
        if self.best.as_ref().is_none_or(|(b, _)| &a < b) {
            self.best = Some((a, x.to_vec()));
        }
        Some(g)
    }

    fn accept(&self, x: &[Q]) -> bool {
        self.f.eval(x).is_ok_and(|v| (v - self.target).abs() <= *self.tol)
    }

    fn bisect(&mut self, piece: usize, neg: &[Q], pos: &[Q]) -> Option<Vec<Q>> {
        let (mut lo, mut hi) = (neg.to_vec(), pos.to_vec());
        for _ in 0..self.cap {
            let mid: Vec<Q> = lo.iter().zip(&hi).map(|(a, b)| midpoint(a, b)).collect();
            let g = self.gap_on(piece, &mid)?;
            if g.abs() <= *self.tol {
                return self.accept(&mid).then_some(mid);
            }
            if g < Q::zero() {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        None
    }
}

fn generic_values() -> Vec<Q> {
    let mut v = vec![Q::zero(), Q::new(1.into(), 2.into()), Q::new((-1).into(), 2.into())];
    for e in 0..=20u32 {
        let p = Q::from_integer(num_bigint::BigInt::from(1u64 << e));
        v.push(-p.clone());
        v.push(p);
    }
    v
}

fn thin(mut v: Vec<Q>, cap: usize) -> Vec<Q> {
    if v.len() <= cap {
        return v;
    }
    v.sort_by_key(|x| x.abs());
    let mut keep: Vec<Q> = v[..cap].to_vec();
    keep.sort();
    keep
}

fn axis_candidates(c: &CoordConstraint, cap: usize) -> Vec<Q> {
    if let Some(vals) = c.feasible_values() {
        return thin(vals, cap.max(32));
    }
    let mut v: Vec<Q> = generic_values().into_iter().filter(|x| c.admits(x)).collect();
    let quarter = |a: &Q, b: &Q, t: i64| a + (b - a) * Q::new(t.into(), 4.into());
    match (&c.lo, &c.hi) {
        (Some(a), Some(b)) => {
            for t in 0..=4 {
                v.push(quarter(a, b, t));
            }
        }
        (Some(a), None) => v.extend([a.clone(), a + Q::from_integer(1.into())]),
        (None, Some(b)) => v.extend([b.clone(), b - Q::from_integer(1.into())]),
        (None, None) => {}
    }
    v.sort();
    v.dedup();
    v
}

fn random_value(rng: &mut ChaCha8Rng, cands: &[Q], c: &CoordConstraint) -> Q {
    if c.values.is_some() || rng.gen_bool(0.5) {
        return cands[rng.gen_range(0..cands.len())].clone();
    }
    let scale: u32 = rng.gen_range(0..12);
    let den = num_bigint::BigInt::from(1u64 << scale);
    let num: i64 = rng.gen_range(-(1i64 << (scale + 4))..=(1i64 << (scale + 4)));
    let x = Q::new(num.into(), den);
    if c.admits(&x) {
        x
    } else {
        cands[rng.gen_range(0..cands.len())].clone()
    }
}

fn segment_ok(cons: &[CoordConstraint], a: &[Q], b: &[Q]) -> bool {
    cons.iter().zip(a.iter().zip(b)).all(|(c, (x, y))| c.values.is_none() || x == y)
}

/// Finds a rational point `x` with `|f(x) - target| <= tol`. The search is
/// deterministic for a given `seed`. On failure the error names the closest
/// energy reached.
pub fn find_representative(
    f: &PiecewisePolynomial,
    target: &Q,
    tol: &Q,
    seed: u64,
    limits: &SearchLimits,
) -> std::result::Result<Vec<Q>, String> {
    let d = f.dim();
    let mut ctx = Ctx { f, target, tol, cap: 64 + rational_bit_len(tol), best: None };
    for (pi, piece) in f.pieces().iter().enumerate() {
        let cons = piece.region.constraints(d);
        let cands: Vec<Vec<Q>> = cons.iter().map(|c| axis_candidates(c, limits.values_per_axis)).collect();
        if cands.iter().any(|c| c.is_empty()) {
            continue;
        }
        let base: Vec<Q> = cands.iter().map(|c| c.iter().min_by_key(|x| x.abs()).expect("nonempty").clone()).collect();

        if let Some(c) = piece.constant() {
            if (&c - target).abs() <= *tol && ctx.accept(&base) && f.active_piece(&base) == Some(pi) {
                return Ok(base);
            }
        }

        let mut probes: Vec<(Vec<Q>, Q)> = Vec::new();
        let mut line_pairs: Vec<(Vec<Q>, Vec<Q>)> = Vec::new();
        for j in 0..d.max(1) {
            let mut line: Vec<(Vec<Q>, Q)> = Vec::new();
            let axis = if d == 0 { &[][..] } else { &cands[j][..] };
            let points: Vec<Vec<Q>> = if d == 0 {
                vec![vec![]]
            } else {
                axis.iter()
                    .map(|v| {
                        let mut x = base.clone();
                        x[j] = v.clone();
                        x
                    })
                    .collect()
            };
            for x in points {
                if let Some(g) = ctx.gap_on(pi, &x) {
                    if g.abs() <= *tol && ctx.accept(&x) {
                        return Ok(x);
                    }
                    line.push((x, g));
                }
            }
            for w in line.windows(2) {
                let (a, b) = (&w[0], &w[1]);
                if a.1.is_negative() != b.1.is_negative() && segment_ok(&cons, &a.0, &b.0) {
                    if a.1.is_negative() {
                        line_pairs.push((a.0.clone(), b.0.clone()));
                    } else {
                        line_pairs.push((b.0.clone(), a.0.clone()));
                    }
                }
            }
            probes.extend(line);
        }
        for (a, b) in line_pairs.iter().take(limits.max_brackets) {
            if let Some(x) = ctx.bisect(pi, a, b) {
                return Ok(x);
            }
        }

        let mut extra: Vec<Vec<Q>> = Vec::new();
        if (1..=3).contains(&d) {
            let small: Vec<Vec<Q>> = cands.iter().map(|c| thin(c.clone(), limits.values_per_axis)).collect();
            let mut grid: Vec<Vec<Q>> = vec![vec![]];
            for axis in &small {
                grid = grid
                    .into_iter()
                    .flat_map(|p| {
                        axis.iter().map(move |v| {
                            let mut q = p.clone();
                            q.push(v.clone());
                            q
                        })
                    })
                    .collect();
            }
            extra.extend(grid);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ pi as u64);
        for _ in 0..limits.random_probes {
            extra.push(cons.iter().zip(&cands).map(|(c, cs)| random_value(&mut rng, cs, c)).collect());
        }
        for x in extra {
            if let Some(g) = ctx.gap_on(pi, &x) {
                if g.abs() <= *tol && ctx.accept(&x) {
                    return Ok(x);
                }
                probes.push((x, g));
            }
        }
        let (neg, pos): (Vec<_>, Vec<_>) = probes.iter().partition(|p| p.1.is_negative());
        let mut tried = 0;
        'outer: for a in &neg {
            for b in &pos {
                if tried >= limits.max_brackets {
                    break 'outer;
                }
                if segment_ok(&cons, &a.0, &b.0) {
                    tried += 1;
                    if let Some(x) = ctx.bisect(pi, &a.0, &b.0) {
                        return Ok(x);
                    }
                }
            }
        }
    }
    pattern_search(&mut ctx, limits).ok_or_else(|| match &ctx.best {
        Some((gap, _)) => format!("closest energy found is {gap} away from the summary {target}, tolerance {tol}"),
        None => "no probe point lies in any clause region".to_string(),
    })
}

fn pattern_search(ctx: &mut Ctx<'_>, limits: &SearchLimits) -> Option<Vec<Q>> {
    let (_, start) = ctx.best.clone()?;
    let gap = |ctx: &Ctx<'_>, x: &[Q]| ctx.f.eval(x).ok().map(|v| (v - ctx.target).abs());
    let mut x = start;
    let mut cur = gap(ctx, &x)?;
    let mut step = Q::from_integer(16.into());
    let floor = Q::new(1.into(), num_bigint::BigInt::from(1u64 << 62));
    let mut moves = 0;
    while step >= floor && moves < limits.pattern_moves {
        let mut improved = false;
        for j in 0..x.len() {
            for s in [step.clone(), -step.clone()] {
                let mut y = x.clone();
                y[j] += &s;
                moves += 1;
                if let Some(g) = gap(ctx, &y) {
                    if g < cur {
                        x = y;
                        cur = g;
                        improved = true;
                        if cur <= *ctx.tol {
                            return Some(x);
                        }
                    }
                }
            }
        }
        if !improved {
            step /= Q::from_integer(2.into());
        }
    }
    (cur <= *ctx.tol).then_some(x)
}
