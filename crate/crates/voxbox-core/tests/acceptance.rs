//! Acceptance criteria. Each criterion prints one line with its verdict,
//! measured values and elapsed time against its time limit.

mod common;

use common::*;
use num_bigint::BigInt;
use num_traits::Signed;
use rand::Rng;
use std::time::{Duration, Instant};
use voxbox_core::boxgeom::{convex_corners, embed_boxes, extremal_corner_sets, GridBox, RangeSpace, RatBox};
use voxbox_core::cluster::EnergyCache;
use voxbox_core::codec::{deserialize, serialize, BoxCoverSummaries, Codeword};
use voxbox_core::engine::{compress_exact, compress_greedy, decompress, verify_index_consistency};
use voxbox_core::field::VoxelField;
use voxbox_core::poly::parse_polynomial;
use voxbox_core::rational::{q, qi};
use voxbox_core::reductions::{
    build_apx_instance, build_np_instance, build_vgrid_instance, phi_embed, BinaryMatrix, Special3SC, VGridInstance,
};
use voxbox_core::sweepline::cover_complement;
use voxbox_core::Q;

struct Outcome {
    ok: bool,
    detail: String,
}

fn outcome(ok: bool, detail: impl Into<String>) -> Outcome {
    Outcome { ok, detail: detail.into() }
}

fn run(id: usize, name: &str, limit_s: u64, body: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let out = body();
    let took = start.elapsed();
    let in_time = took <= Duration::from_secs(limit_s);
    let pass = out.ok && in_time;
    println!(
        "criterion {id:>2} {}: {name}: {} ({:.2} s, limit {limit_s} s)",
        if pass { "PASS" } else { "FAIL" },
        out.detail,
        took.as_secs_f64()
    );
    pass
}

fn digits(x: &BigInt) -> usize {
    (x.bits() as usize).max(1)
}

fn rational_cost(x: &Q) -> usize {
    2 + 2 * digits(x.numer()) + 2 + 2 * digits(x.denom()) + 2
}

/// Codeword length from the closed form with two-bit delimiters.
fn closed_form(p: &BoxCoverSummaries) -> usize {
    let r = 2;
    let k = p.k();
    let entries = p.entries();
    let mut size_n = 0;
    let mut v = 0;
    if !entries.is_empty() {
        let mut dims = vec![0usize; k];
        for e in entries {
            for (j, &c) in e.bx.c2().iter().enumerate() {
                dims[j] = dims[j].max(c);
            }
        }
        let n: usize = dims.iter().product();
        size_n = 2 + 2 * digits(&BigInt::from(n)) + 2;
        let w = entries.iter().map(|e| digits(e.summary.numer()).max(digits(e.summary.denom()))).max().unwrap();
        v = 2 + 2 * w + 2;
    }
    let size_f = 8 * p.f().canonical().len() + 2;
    entries.len() * ((2 * k + 6) * r + 2 * k * size_n + 2 * v) + 5 * r + rational_cost(p.eps_star()) + rational_cost(p.eps()) + size_f
}

fn criterion_size_formula() -> Outcome {
    let mut r = rng(1);
    let mut bad = 0;
    for _ in 0..500 {
        let p = random_payload(&mut r);
        if serialize(&p).bit_length() != closed_form(&p) {
            bad += 1;
        }
    }
    outcome(bad == 0, format!("500 payloads, {bad} length mismatches"))
}

fn criterion_codec_roundtrip() -> Outcome {
    let mut r = rng(2);
    let mut roundtrip_failures = 0;
    let (mut flips, mut rejected, mut slips) = (0, 0, 0);
    let mut kinds = [0usize; 4];
    for _ in 0..1000 {
        let p = random_payload(&mut r);
        let code = serialize(&p);
        if deserialize(&code).ok().as_ref() != Some(&p) {
            roundtrip_failures += 1;
        }
        let bits = code.bits();
        for _ in 0..24 {
            let at = r.gen_range(0..bits.len());
            let mut flipped = bits.to_vec();
            flipped[at] = !flipped[at];
            flips += 1;
            match deserialize(&Codeword::from_bits(flipped)) {
                Err(_) => rejected += 1,
                Ok(other) if other != p => {
                    slips += 1;
                    let boxes = |x: &BoxCoverSummaries| x.entries().iter().map(|e| e.bx.clone()).collect::<Vec<_>>();
                    let kind = if other.f() != p.f() {
                        3
                    } else if other.eps() != p.eps() || other.eps_star() != p.eps_star() {
                        2
                    } else if boxes(&other) != boxes(&p) {
                        1
                    } else {
                        0
                    };
                    kinds[kind] += 1;
                }
                Ok(_) => {}
            }
        }
    }
    outcome(
        roundtrip_failures == 0 && slips == 0,
        format!(
            "1000 roundtrips, {roundtrip_failures} failures; {flips} single-bit flips, {rejected} rejected, {slips} decoded to a different payload (summaries {}, boxes {}, tolerances {}, function {})",
            kinds[0], kinds[1], kinds[2], kinds[3]
        ),
    )
}

fn subsets(n: usize) -> impl Iterator<Item = Vec<usize>> {
    (1u32..1 << n).map(move |m| (0..n).filter(|&i| m >> i & 1 == 1).collect())
}

fn criterion_mid_range() -> Outcome {
    let mut r = rng(3);
    let (mut checked, mut bad) = (0, 0);
    for _ in 0..300 {
        let n = r.gen_range(1..=8);
        let values: Vec<Q> = (0..n).map(|_| small_rational(&mut r, 20, 10)).collect();
        let eps = q(r.gen_range(1..20), 20);
        let cache = EnergyCache::from_values(values.clone());
        let es = cache.select_epsilon_star(&eps).unwrap().value;
        for s in subsets(n) {
            if spread(&values, &s) <= &es * qi(2) {
                checked += 1;
                let mid = cache.mid_range(&s, &es).unwrap();
                if s.iter().any(|&i| (&values[i] - &mid).abs() > es) {
                    bad += 1;
                }
            }
        }
    }
    outcome(bad == 0, format!("{checked} feasible subsets, {bad} with deviation above the tolerance"))
}

fn criterion_eps_star_maximal() -> Outcome {
    let mut r = rng(4);
    let (mut instances, mut wrong_value, mut differ) = (0, 0, 0);
    while instances < 300 {
        let n = r.gen_range(1..=6);
        let values: Vec<Q> = (0..n).map(|_| small_rational(&mut r, 20, 10)).collect();
        let eps = q(r.gen_range(1..20), 20);
        let two_eps = &eps * qi(2);
        let tie = values.iter().any(|a| values.iter().any(|b| (a - b).abs() == two_eps));
        if tie {
            continue;
        }
        instances += 1;
        let cache = EnergyCache::from_values(values.clone());
        let es = cache.select_epsilon_star(&eps).unwrap().value;
        if es != oracle_eps_star(&values, &eps) {
            wrong_value += 1;
        }
        let two_es = &es * qi(2);
        if subsets(n).any(|s| (spread(&values, &s) <= two_es) != (spread(&values, &s) <= two_eps)) {
            differ += 1;
        }
    }
    outcome(
        wrong_value == 0 && differ == 0,
        format!("{instances} caches, {wrong_value} tolerance mismatches, {differ} with differing feasible families"),
    )
}

fn criterion_sweep_bound() -> Outcome {
    let mut r = rng(5);
    let (mut over, mut unsound, mut worst) = (0, 0, 0.0f64);
    for _ in 0..200 {
        let qside = r.gen_range(1..=32);
        let n = r.gen_range(1..=12);
        let boxes: Vec<GridBox> = (0..n)
            .map(|_| {
                let (a, b) = (r.gen_range(1..=qside), r.gen_range(1..=qside));
                let (c, d) = (r.gen_range(1..=qside), r.gen_range(1..=qside));
                GridBox::new(vec![a.min(b), c.min(d)], vec![a.max(b), c.max(d)]).unwrap()
            })
            .collect();
        let h = cover_complement(&RangeSpace::new(2, qside, boxes.clone()).unwrap()).unwrap();
        if h.len() > 4 * n {
            over += 1;
        }
        worst = worst.max(h.len() as f64 / n as f64);
        let dims = [qside, qside];
        let mut union = vec![false; qside * qside];
        for b in &h {
            for c in box_cells(&dims, b) {
                union[c] = true;
            }
        }
        for c in all_cells(&dims) {
            let in_c = !boxes.iter().any(|b| b.contains(&c));
            if union[index_of(&dims, &c)] != in_c {
                unsound += 1;
                break;
            }
        }
    }
    outcome(
        over == 0 && unsound == 0,
        format!("200 spaces, {over} above 4N, {unsound} with union differing from the complement, max boxes/N {worst:.2}"),
    )
}

fn criterion_embedding() -> Outcome {
    let mut r = rng(6);
    let (mut outside, mut order) = (0, 0);
    for _ in 0..200 {
        let k = r.gen_range(1..=3);
        let n = r.gen_range(1..=10);
        let boxes: Vec<RatBox> = (0..n)
            .map(|_| {
                let lo: Vec<Q> = (0..k).map(|_| small_rational(&mut r, 6, 4)).collect();
                let hi: Vec<Q> = lo.iter().map(|a| a + q(r.gen_range(0..=8), r.gen_range(1..=4))).collect();
                RatBox::new(lo, hi).unwrap()
            })
            .collect();
        let (_, rs) = embed_boxes(&boxes).unwrap();
        if rs.boxes.iter().any(|b| b.c1().iter().chain(b.c2()).any(|&c| c < 1 || c > 2 * n)) {
            outside += 1;
        }
        for j in 0..k {
            let ends: Vec<(Q, usize)> = boxes
                .iter()
                .zip(&rs.boxes)
                .flat_map(|(b, g)| [(b.lo[j].clone(), g.c1()[j]), (b.hi[j].clone(), g.c2()[j])])
                .collect();
            if ends.iter().any(|(x, gx)| ends.iter().any(|(y, gy)| x.cmp(y) != gx.cmp(gy))) {
                order += 1;
            }
        }
    }
    outcome(outside == 0 && order == 0, format!("200 collections, {outside} outside [2N]^k, {order} axes with broken order"))
}

fn criterion_end_to_end() -> Outcome {
    let mut r = rng(7);
    let (mut violations, mut failures) = (0, 0);
    let mut voxels = 0;
    for _ in 0..100 {
        let k = r.gen_range(1..=3);
        let mut dims = Vec::new();
        for _ in 0..k {
            let room = 200 / dims.iter().product::<usize>();
            dims.push(r.gen_range(1..=room.min(14)));
        }
        let d = r.gen_range(1..=3);
        let field = random_field(&mut r, &dims, d);
        let f = random_poly(&mut r, d);
        let eps = q(r.gen_range(1..=10), 20);
        voxels += field.n();
        let res = compress_greedy(&field, &f, &eps).unwrap();
        let code = serialize(&deserialize(&res.codeword).unwrap());
        match decompress(&code) {
            Ok(recon) => violations += verify_index_consistency(&field, &recon, &f, &eps).unwrap().len(),
            Err(e) => {
                failures += 1;
                eprintln!("decompression failed: {e}");
            }
        }
    }
    outcome(
        violations == 0 && failures == 0,
        format!("100 instances, {voxels} voxels, {violations} distortion violations, {failures} decompression failures"),
    )
}

/// Minimum box cover of a scalar field with identity energy, by search over
/// every feasible rectangle.
fn brute_force_count(dims: &[usize], values: &[Q], eps: &Q) -> usize {
    let two_es = oracle_eps_star(values, eps) * qi(2);
    let sets: Vec<Vec<usize>> = all_boxes(dims)
        .iter()
        .map(|b| box_cells(dims, b))
        .filter(|c| spread(values, c) <= two_es)
        .collect();
    min_cover(values.len(), &sets).unwrap()
}

fn scalar_field(dims: &[usize], values: &[Q]) -> VoxelField {
    VoxelField::with_hull(dims.to_vec(), 1, values.iter().map(|v| vec![v.clone()]).collect()).unwrap()
}

fn criterion_exact_oracle() -> Outcome {
    let identity = parse_polynomial("x1", 1).unwrap();
    let eps = q(1, 10);
    let palette = [qi(0), q(1, 10), q(1, 5), q(3, 10), qi(1)];
    let (mut cases, mut bad) = (0, 0);
    let mut check = |dims: &[usize], values: Vec<Q>| {
        cases += 1;
        let got = compress_exact(&scalar_field(dims, &values), &identity, &eps, values.len()).unwrap();
        if got.payload.entries().len() != brute_force_count(dims, &values, &eps) {
            bad += 1;
        }
    };
    for code in 0..palette.len().pow(4) {
        let values = (0..4).map(|i| palette[code / palette.len().pow(i) % palette.len()].clone()).collect();
        check(&[2, 2], values);
    }
    let mut r = rng(8);
    for dims in [[2, 3], [3, 2], [3, 3]] {
        for _ in 0..60 {
            let values = (0..dims[0] * dims[1]).map(|_| q(r.gen_range(0..=12), 20)).collect();
            check(&dims, values);
        }
    }
    outcome(bad == 0, format!("{cases} instances, {bad} entry-count disagreements"))
}

fn criterion_np_biconditional() -> Outcome {
    let (mut pairs, mut bad) = (0, 0);
    for mask in 0u32..512 {
        let cells: Vec<bool> = (0..9).map(|i| mask >> i & 1 == 1).collect();
        let mat = BinaryMatrix::new(3, cells.clone()).unwrap();
        let ones: Vec<usize> = (0..9).filter(|&i| cells[i]).collect();
        let pos: Vec<usize> = {
            let mut p = vec![usize::MAX; 9];
            for (t, &i) in ones.iter().enumerate() {
                p[i] = t;
            }
            p
        };
        let rects: Vec<Vec<usize>> = all_boxes(&[3, 3])
            .iter()
            .map(|b| box_cells(&[3, 3], b))
            .filter(|c| c.iter().all(|&i| cells[i]))
            .map(|c| c.iter().map(|&i| pos[i]).collect())
            .collect();
        let cover = if ones.is_empty() { 0 } else { min_cover(ones.len(), &rects).unwrap() };
        let base = build_np_instance(&mat, 1).unwrap();
        let best = compress_exact(&base.field, &base.f, &base.eps, 9).unwrap().codeword.bit_length();
        for k_prime in 1..=9 {
            pairs += 1;
            let inst = build_np_instance(&mat, k_prime).unwrap();
            if (cover <= k_prime) != (best <= inst.k_bits) {
                bad += 1;
            }
        }
    }
    outcome(bad == 0, format!("{pairs} matrix/budget pairs, {bad} where the two questions disagree"))
}

fn toys() -> Vec<Special3SC> {
    let mut out = vec![Special3SC::new(3, vec![[1, 2, 3], [1, 2, 3]]).unwrap()];
    for seed in 0..3 {
        out.push(Special3SC::sample(4, seed).unwrap());
    }
    out
}

struct ChainCounts {
    originals: usize,
    complement: usize,
    full: usize,
    union_only: usize,
}

fn chain_counts(v: &VGridInstance) -> ChainCounts {
    let dims = [v.q, v.q];
    let originals = v.originals();
    let complement = v.complement();
    let all: Vec<Vec<usize>> = v.boxes.iter().map(|b| box_cells(&dims, b)).collect();
    let full = min_cover(v.q * v.q, &all).expect("original and complement boxes cover the grid");
    let mut covered: Vec<usize> = originals.iter().flat_map(|b| box_cells(&dims, b)).collect();
    covered.sort_unstable();
    covered.dedup();
    let mut pos = vec![usize::MAX; v.q * v.q];
    for (t, &c) in covered.iter().enumerate() {
        pos[c] = t;
    }
    let sets: Vec<Vec<usize>> =
        originals.iter().map(|b| box_cells(&dims, b).iter().map(|&c| pos[c]).collect()).collect();
    let union_only = min_cover(covered.len(), &sets).unwrap();
    ChainCounts { originals: originals.len(), complement: complement.len(), full, union_only }
}

fn criterion_chain() -> Outcome {
    let mut bad = 0;
    let mut notes = Vec::new();
    for inst in toys() {
        let v = build_vgrid_instance(&phi_embed(&inst).unwrap()).unwrap();
        let c = chain_counts(&v);
        let split = c.full == c.union_only + c.complement;
        let lower = 3 * c.full >= c.originals + 3 * c.complement;
        if !(split && lower) {
            bad += 1;
        }
        notes.push(format!("m={} |S'|={} |S|={} |H|={}", inst.m(), c.full, c.union_only, c.complement));
    }
    outcome(bad == 0, format!("{} toys, {bad} failing [{}]", notes.len(), notes.join("; ")))
}

/// Minimum cover of a grid by rectangles of constant value.
fn constant_box_cover(q_side: usize, values: &[i64]) -> usize {
    let dims = [q_side, q_side];
    let constant = |r0: usize, c0: usize, r1: usize, c1: usize| {
        let v = values[(r0 - 1) * q_side + c0 - 1];
        (r0..=r1).all(|r| (c0..=c1).all(|c| values[(r - 1) * q_side + c - 1] == v))
    };
    let mut sets = Vec::new();
    for r0 in 1..=q_side {
        for c0 in 1..=q_side {
            for r1 in r0..=q_side {
                if !constant(r0, c0, r1, c0) {
                    break;
                }
                for c1 in c0..=q_side {
                    if !constant(r0, c0, r1, c1) {
                        break;
                    }
                    let grows = (r0 > 1 && constant(r0 - 1, c0, r1, c1))
                        || (c0 > 1 && constant(r0, c0 - 1, r1, c1))
                        || (r1 < q_side && constant(r0, c0, r1 + 1, c1))
                        || (c1 < q_side && constant(r0, c0, r1, c1 + 1));
                    if !grows {
                        sets.push(box_cells(&dims, &GridBox::new(vec![r0, c0], vec![r1, c1]).unwrap()));
                    }
                }
            }
        }
    }
    min_cover(q_side * q_side, &sets).unwrap()
}

fn criterion_apx() -> Outcome {
    let mut bad = 0;
    let mut notes = Vec::new();
    for inst in toys() {
        let v = build_vgrid_instance(&phi_embed(&inst).unwrap()).unwrap();
        let apx = build_apx_instance(&v).unwrap();
        let energies: Vec<i64> = apx
            .field
            .data()
            .iter()
            .map(|x| {
                let e = apx.f.eval(x).unwrap();
                assert!(e.is_integer());
                e.to_integer().try_into().unwrap()
            })
            .collect();
        let oracle = constant_box_cover(v.q, &energies);
        let engine = compress_exact(&apx.field, &apx.f, &apx.eps, v.q * v.q).unwrap().payload.entries().len();
        let vgrid = chain_counts(&v).full;
        if oracle != vgrid || engine != oracle {
            bad += 1;
        }
        notes.push(format!("m={} compression {oracle} (engine {engine}) vs cover {vgrid}", inst.m()));
    }
    outcome(bad == 0, format!("{} toys, {bad} failing [{}]", notes.len(), notes.join("; ")))
}

fn criterion_corner_census() -> Outcome {
    let (mut boxes, mut bad) = (0, 0);
    for k in 1..=3 {
        let dims = vec![4; k];
        for b in all_boxes(&dims) {
            boxes += 1;
            let free: Vec<usize> = (0..k).filter(|&j| b.c1()[j] != b.c2()[j]).collect();
            let mut expected: Vec<Vec<usize>> = vec![b.c1().to_vec()];
            for &j in &free {
                expected = expected
                    .into_iter()
                    .flat_map(|x| {
                        let mut y = x.clone();
                        y[j] = b.c2()[j];
                        [x, y]
                    })
                    .collect();
            }
            expected.sort();
            let mut got = convex_corners(&b, &dims);
            got.sort();
            let (minimax, maximin) = extremal_corner_sets(&b);
            let c1 = minimax.iter().min().unwrap().clone();
            let c2 = maximin.iter().max().unwrap().clone();
            let rebuilt = GridBox::new(c1, c2).ok();
            if got.len() != 1 << free.len() || got != expected || rebuilt.as_ref() != Some(&b) {
                bad += 1;
            }
        }
    }
    outcome(bad == 0, format!("{boxes} boxes, {bad} with a wrong corner count or reconstruction"))
}

fn main() {
    let results = [
        run(1, "size formula exactness", 5, criterion_size_formula),
        run(2, "codec roundtrip and bit-flip rejection", 30, criterion_codec_roundtrip),
        run(3, "mid-range deviation bound", 10, criterion_mid_range),
        run(4, "tolerance maximality", 10, criterion_eps_star_maximal),
        run(5, "complement sweep bound", 20, criterion_sweep_bound),
        run(6, "integer embedding bound", 5, criterion_embedding),
        run(7, "end-to-end index consistency", 60, criterion_end_to_end),
        run(8, "exact solver against brute force", 120, criterion_exact_oracle),
        run(9, "matrix reduction biconditional", 120, criterion_np_biconditional),
        run(10, "reduction chain arithmetic", 60, criterion_chain),
        run(11, "compression and grid cover optima", 120, criterion_apx),
        run(12, "corner census", 5, criterion_corner_census),
    ];
    let passed = results.iter().filter(|&&p| p).count();
    println!("acceptance: {passed}/{} criteria passed", results.len());
    if passed != results.len() {
        std::process::exit(1);
    }
}
