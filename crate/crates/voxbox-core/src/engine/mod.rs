//! Compression search and decompression.
//!
//! Compression covers the voxel grid with boxes whose energies span at most
//! `2 eps_star` and summarizes each box by its mid-range energy. The greedy
//! encoder grows boxes axis by axis in scan order; the exact encoder solves
//! a minimum set cover over all maximal feasible boxes.
//!
//! Decompression knows only the codeword. For each box it searches for a
//! rational vector whose energy lies within `eps - eps_star` of the box
//! summary, then writes that vector to every voxel of the box. The search
//! probes structured and pseudo-random points inside each clause region,
//! bisects the clause polynomial between probes of opposite sign, and falls
//! back to a pattern search; every candidate is checked against the full
//! function before it is accepted.

mod represent;

pub use represent::{find_representative, SearchLimits};

use crate::boxgeom::GridBox;
use crate::cluster::EnergyCache;
use crate::codec::{compression_ratio, serialize, BoxCoverSummaries, Codeword, Entry};
use crate::error::{Error, Result};
use crate::field::{coord0, flat0, grid_len, VoxelCoord, VoxelField};
use crate::poly::PiecewisePolynomial;
use crate::rational::{midpoint, Q};
use crate::setcover::exact_cover;
use num_traits::Signed;
use rayon::prelude::*;
use std::time::Instant;

/// Counters and timings of a compression run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompressionStats {
    /// Number of voxels.
    pub voxels: usize,
    /// Number of boxes in the cover.
    pub entries: usize,
    /// Candidate boxes considered by the exact search, zero for greedy.
    pub candidates: usize,
    /// Bits needed to store the field itself.
    pub field_bits: usize,
    /// Bits of the codeword.
    pub code_bits: usize,
    /// Wall-clock time of the search in milliseconds.
    pub elapsed_ms: u128,
}

/// A payload, its codeword and the achieved compression ratio.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompressionResult {
    pub payload: BoxCoverSummaries,
    pub codeword: Codeword,
    pub ratio: Q,
    pub stats: CompressionStats,
}

/// A decompressed field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reconstruction {
    pub field_hat: VoxelField,
}

fn prepare(field: &VoxelField, f: &PiecewisePolynomial, eps: &Q) -> Result<(EnergyCache, Q)> {
    if field.n() == 0 {
        return Err(Error::InvalidArgument("the field has no voxels".into()));
    }
    let cache = EnergyCache::build(field, f)?;
    let es = cache.select_epsilon_star(eps)?.value;
    Ok((cache, es))
}

fn finish(
    field: &VoxelField,
    f: &PiecewisePolynomial,
    eps: &Q,
    eps_star: Q,
    entries: Vec<Entry>,
    candidates: usize,
    start: Instant,
) -> Result<CompressionResult> {
    let payload = BoxCoverSummaries::new(entries, eps_star, eps.clone(), f.clone())?;
    let codeword = serialize(&payload);
    let ratio = compression_ratio(&payload, field);
    let stats = CompressionStats {
        voxels: field.n(),
        entries: payload.entries().len(),
        candidates,
        field_bits: field.size_bits(),
        code_bits: codeword.bit_length(),
        elapsed_ms: start.elapsed().as_millis(),
    };
    Ok(CompressionResult { payload, codeword, ratio, stats })
}

/// Greedy cover: at each uncovered voxel in row-major order, grow a box
/// along axis 1, then axis 2 and so on, while its energy span stays within
/// `2 eps_star`. Boxes may overlap.
pub fn compress_greedy(field: &VoxelField, f: &PiecewisePolynomial, eps: &Q) -> Result<CompressionResult> {
    let start = Instant::now();
    let (cache, es) = prepare(field, f, eps)?;
    let two = &es * Q::from_integer(2.into());
    let dims = field.dims();
    let vals = cache.values();
    let mut covered = vec![false; field.n()];
    let mut entries = Vec::new();
    for i in 0..field.n() {
        if covered[i] {
            continue;
        }
        let c = coord0(dims, i);
        let (c1, mut c2) = (c.clone(), c);
        let (mut lo, mut hi) = (vals[i].clone(), vals[i].clone());
        for j in 0..dims.len() {
            while c2[j] < dims[j] {
                let mut slab_hi = c2.clone();
                slab_hi[j] += 1;
                let mut slab_lo = c1.clone();
                slab_lo[j] = slab_hi[j];
                let slab = GridBox::new(slab_lo, slab_hi.clone())?;
                let (mut nlo, mut nhi) = (lo.clone(), hi.clone());
                for cell in slab.cells() {
                    let v = &vals[flat0(dims, &cell)];
                    if v < &nlo {
                        nlo = v.clone();
                    }
                    if v > &nhi {
                        nhi = v.clone();
                    }
                }
                if &nhi - &nlo > two {
                    break;
                }
                c2 = slab_hi;
                lo = nlo;
                hi = nhi;
            }
        }
        let bx = GridBox::new(c1, c2)?;
        for cell in bx.cells() {
            covered[flat0(dims, &cell)] = true;
        }
        entries.push(Entry { bx, summary: midpoint(&lo, &hi) });
    }
    finish(field, f, eps, es, entries, 0, start)
}

/// Inclusion-maximal boxes whose energy span is within `2 eps_star`, with
/// their mid-range summaries.
pub fn maximal_feasible_boxes(dims: &[usize], values: &[Q], eps_star: &Q) -> Result<Vec<(GridBox, Q)>> {
    let n = grid_len(dims);
    let k = dims.len();
    let mut sorted: Vec<Q> = values.to_vec();
    sorted.sort();
    sorted.dedup();
    let rank: Vec<u32> = values.iter().map(|v| sorted.binary_search(v).expect("value is ranked") as u32).collect();
    let two = eps_star * Q::from_integer(2.into());
    let mut reach = vec![0u32; sorted.len()];
    let mut hi = 0;
    for lo in 0..sorted.len() {
        hi = hi.max(lo);
        while hi + 1 < sorted.len() && sorted[hi + 1].clone() - &sorted[lo] <= two {
            hi += 1;
        }
        reach[lo] = hi as u32;
    }
    let ok = |mn: u32, mx: u32| mx <= reach[mn as usize];
    let span_of = |b: &GridBox| {
        b.cells().iter().fold((u32::MAX, 0u32), |(mn, mx), c| {
            let r = rank[flat0(dims, c)];
            (mn.min(r), mx.max(r))
        })
    };
    let mut out = Vec::new();
    let mut mins = vec![u32::MAX; n];
    let mut maxs = vec![0u32; n];
    for s in 0..n {
        let c1 = coord0(dims, s);
        for t in s..n {
            let c2 = coord0(dims, t);
            if c2.iter().zip(&c1).any(|(b, a)| b < a) {
                mins[t] = u32::MAX;
                continue;
            }
            let (mut mn, mut mx) = (rank[t], rank[t]);
            let mut feasible = true;
            for j in 0..k {
                if c2[j] > c1[j] {
                    let mut p = c2.clone();
                    p[j] -= 1;
                    let u = flat0(dims, &p);
                    if mins[u] == u32::MAX {
                        feasible = false;
                        break;
                    }
                    mn = mn.min(mins[u]);
                    mx = mx.max(maxs[u]);
                }
            }
            if !feasible || !ok(mn, mx) {
                mins[t] = u32::MAX;
                continue;
            }
            mins[t] = mn;
            maxs[t] = mx;
            let bx = GridBox::new(c1.clone(), c2)?;
            let mut maximal = true;
            for j in 0..k {
                if bx.c2()[j] < dims[j] {
                    let mut lo = bx.c1().to_vec();
                    lo[j] = bx.c2()[j] + 1;
                    let mut hi = bx.c2().to_vec();
                    hi[j] += 1;
                    let (a, b) = span_of(&GridBox::new(lo, hi)?);
                    if ok(mn.min(a), mx.max(b)) {
                        maximal = false;
                        break;
                    }
                }
                if bx.c1()[j] > 1 {
                    let mut lo = bx.c1().to_vec();
                    lo[j] -= 1;
                    let mut hi = bx.c2().to_vec();
                    hi[j] = lo[j];
                    let (a, b) = span_of(&GridBox::new(lo, hi)?);
                    if ok(mn.min(a), mx.max(b)) {
                        maximal = false;
                        break;
                    }
                }
            }
            if maximal {
                let summary = midpoint(&sorted[mn as usize], &sorted[mx as usize]);
                out.push((bx, summary));
            }
        }
    }
    Ok(out)
}

/// Most optimal covers compared when breaking ties by codeword length.
pub const EXACT_TIE_CAP: usize = 64;

/// Node limit of the exact set-cover search.
pub const EXACT_NODE_LIMIT: u64 = 50_000_000;

/// Minimum-cardinality feasible box cover. Among optimal covers built from
/// maximal boxes, the shortest codeword wins, then the smallest entry list.
/// Refuses fields with more than `budget` voxels.
pub fn compress_exact(field: &VoxelField, f: &PiecewisePolynomial, eps: &Q, budget: usize) -> Result<CompressionResult> {
    if field.n() > budget {
        return Err(Error::BudgetExceeded { size: field.n(), budget });
    }
    let start = Instant::now();
    let (cache, es) = prepare(field, f, eps)?;
    let dims = field.dims();
    let boxes = maximal_feasible_boxes(dims, cache.values(), &es)?;
    let sets: Vec<Vec<usize>> = boxes.iter().map(|(b, _)| b.cells().iter().map(|c| flat0(dims, c)).collect()).collect();
    let sol = exact_cover(field.n(), &sets, EXACT_TIE_CAP, EXACT_NODE_LIMIT)?;
    let mut best: Option<(usize, Vec<Entry>)> = None;
    for cover in &sol.covers {
        let entries: Vec<Entry> =
            cover.iter().map(|&s| Entry { bx: boxes[s].0.clone(), summary: boxes[s].1.clone() }).collect();
        let p = BoxCoverSummaries::new(entries, es.clone(), eps.clone(), f.clone())?;
        let len = serialize(&p).bit_length();
        let key = (len, p.entries().to_vec());
        let better = match &best {
            None => true,
            Some((bl, be)) => len < *bl || (len == *bl && entry_order_less(&key.1, be)),
        };
        if better {
            best = Some(key);
        }
    }
    let (_, entries) = best.expect("a cover exists");
    finish(field, f, eps, es, entries, boxes.len(), start)
}

fn entry_order_less(a: &[Entry], b: &[Entry]) -> bool {
    let key = |e: &[Entry]| e.iter().map(|x| (x.bx.clone(), x.summary.clone())).collect::<Vec<_>>();
    key(a) < key(b)
}

/// Decodes a codeword and reconstructs a field: every voxel of a box gets
/// the box's representative vector, later boxes overwriting earlier ones.
pub fn decompress(code: &Codeword) -> Result<Reconstruction> {
    let payload = crate::codec::deserialize(code)?;
    decompress_payload(&payload)
}

/// Reconstructs a field from a decoded payload.
pub fn decompress_payload(p: &BoxCoverSummaries) -> Result<Reconstruction> {
    let f = p.f();
    let tol = p.eps() - p.eps_star();
    let reps = p
        .entries()
        .par_iter()
        .enumerate()
        .map(|(i, e)| find_representative(f, &e.summary, &tol, i as u64, &SearchLimits::default()).map_err(|m| Error::SolverFailure { index: i, msg: m }))
        .collect::<Result<Vec<_>>>()?;
    let dims = if p.entries().is_empty() { vec![0] } else { p.dims() };
    let mut data: Vec<Option<Vec<Q>>> = vec![None; grid_len(&dims)];
    for (e, x) in p.entries().iter().zip(reps) {
        for c in e.bx.cells() {
            data[flat0(&dims, &c)] = Some(x.clone());
        }
    }
    let data = data
        .into_iter()
        .enumerate()
        .map(|(i, v)| v.ok_or_else(|| Error::InvariantViolation(format!("voxel {} is not covered", VoxelCoord(coord0(&dims, i))))))
        .collect::<Result<Vec<_>>>()?;
    Ok(Reconstruction { field_hat: VoxelField::with_hull(dims, f.dim(), data)? })
}

/// Voxels where the energy of the reconstruction differs from the energy of
/// the original by more than `eps`; empty when the pair is index consistent.
pub fn verify_index_consistency(field: &VoxelField, recon: &Reconstruction, f: &PiecewisePolynomial, eps: &Q) -> Result<Vec<VoxelCoord>> {
    let hat = &recon.field_hat;
    if hat.dims() != field.dims() || hat.d() != field.d() {
        return Err(Error::DimensionMismatch(format!(
            "reconstruction has grid {:?} with D = {}, original has {:?} with D = {}",
            hat.dims(),
            hat.d(),
            field.dims(),
            field.d()
        )));
    }
    let bad = (0..field.n())
        .into_par_iter()
        .map(|i| -> Result<Option<usize>> {
            let a = f.eval(field.vector(i))?;
            let b = f.eval(hat.vector(i))?;
            Ok(((a - b).abs() > *eps).then_some(i))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(bad.into_iter().flatten().map(|i| VoxelCoord(coord0(field.dims(), i))).collect())
}
