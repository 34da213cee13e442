//! Property tests over randomly generated inputs.

use crate::test_support::*;
use num_traits::Signed;
use proptest::prelude::*;
use voxbox_core::boxgeom::{embed_boxes, GridBox, RangeSpace, RatBox};
use voxbox_core::cluster::EnergyCache;
use voxbox_core::codec::{deserialize, serialize, size_formula};
use voxbox_core::engine::{compress_exact, compress_greedy, decompress, verify_index_consistency};
use voxbox_core::field::{coord_to_flat, flat_to_coord, grid_len};
use voxbox_core::poly::parse_self_describing;
use voxbox_core::rational::{q, qi};
use voxbox_core::sweepline::cover_complement;
use voxbox_core::Q;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn poly_print_parse_roundtrip(seed in any::<u64>(), dim in 1usize..4) {
        let f = random_piecewise(&mut rng(seed), dim);
        let again = parse_self_describing(f.canonical()).unwrap();
        prop_assert_eq!(again.canonical(), f.canonical());
        prop_assert_eq!(again, f);
    }

    #[test]
    fn degree_at_most_length(seed in any::<u64>(), dim in 1usize..4) {
        let f = random_piecewise(&mut rng(seed), dim);
        prop_assert!(f.degree() as usize <= f.len());
    }

    #[test]
    fn eval_scales_to_an_integer(seed in any::<u64>(), den in 1i64..12) {
        let mut r = rng(seed);
        let f = random_poly(&mut r, 2);
        let x: Vec<Q> = (0..2).map(|_| q(rand::Rng::gen_range(&mut r, -20..=20), den)).collect();
        let coeff_den: num_bigint::BigInt = f.pieces()[0]
            .terms
            .iter()
            .fold(num_bigint::BigInt::from(1), |acc, t| num_integer::Integer::lcm(&acc, t.coeff.denom()));
        let scale = Q::from_integer(coeff_den) * qi(den).pow(f.degree() as i32);
        prop_assert!((f.eval(&x).unwrap() * scale).is_integer());
    }

    #[test]
    fn flat_index_bijection(dims in proptest::collection::vec(1usize..6, 1..4)) {
        let n = grid_len(&dims);
        for i in 1..=n {
            let c = flat_to_coord(&dims, i).unwrap();
            prop_assert!(c.0.iter().zip(&dims).all(|(&x, &d)| 1 <= x && x <= d));
            prop_assert_eq!(coord_to_flat(&dims, &c).unwrap(), i);
        }
        prop_assert!(flat_to_coord(&dims, n + 1).is_err());
    }

    #[test]
    fn codec_roundtrip_and_size(seed in any::<u64>()) {
        let p = random_payload(&mut rng(seed));
        let code = serialize(&p);
        prop_assert_eq!(code.bit_length(), size_formula(&p));
        prop_assert_eq!(deserialize(&code).unwrap(), p);
    }

    #[test]
    fn distinct_payloads_distinct_codewords(a in any::<u64>(), b in any::<u64>()) {
        let (p, r) = (random_payload(&mut rng(a)), random_payload(&mut rng(b)));
        prop_assert_eq!(p == r, serialize(&p) == serialize(&r));
    }

    #[test]
    fn energy_distance_is_a_metric(seed in any::<u64>(), n in 1usize..8) {
        let mut r = rng(seed);
        let cache = EnergyCache::from_values((0..n).map(|_| small_rational(&mut r, 30, 7)).collect());
        for i in 0..n {
            prop_assert_eq!(cache.d_f(i, i).unwrap(), qi(0));
            for j in 0..n {
                prop_assert_eq!(cache.d_f(i, j).unwrap(), cache.d_f(j, i).unwrap());
                for k in 0..n {
                    prop_assert!(cache.d_f(i, k).unwrap() <= cache.d_f(i, j).unwrap() + cache.d_f(j, k).unwrap());
                }
            }
        }
    }

    #[test]
    fn complement_cover_is_exact(seed in any::<u64>()) {
        let mut r = rng(seed);
        let qside = rand::Rng::gen_range(&mut r, 1..=16);
        let boxes: Vec<GridBox> = (0..rand::Rng::gen_range(&mut r, 0..=6))
            .map(|_| {
                let (a, b) = (rand::Rng::gen_range(&mut r, 1..=qside), rand::Rng::gen_range(&mut r, 1..=qside));
                let (c, d) = (rand::Rng::gen_range(&mut r, 1..=qside), rand::Rng::gen_range(&mut r, 1..=qside));
                GridBox::new(vec![a.min(b), c.min(d)], vec![a.max(b), c.max(d)]).unwrap()
            })
            .collect();
        let space = RangeSpace::new(2, qside, boxes.clone()).unwrap();
        let h = cover_complement(&space).unwrap();
        prop_assert!(h.len() <= (4 * boxes.len()).max(1));
        for c in all_cells(&[qside, qside]) {
            let inside = boxes.iter().any(|b| b.contains(&c));
            let hits = h.iter().filter(|b| b.contains(&c)).count();
            prop_assert_eq!(hits, usize::from(!inside));
        }
    }

    #[test]
    fn embedding_preserves_order(seed in any::<u64>(), n in 1usize..6) {
        let mut r = rng(seed);
        let boxes: Vec<RatBox> = (0..n)
            .map(|_| {
                let a = small_rational(&mut r, 5, 3);
                let b = &a + q(rand::Rng::gen_range(&mut r, 0..=6), 2);
                RatBox::new(vec![a], vec![b]).unwrap()
            })
            .collect();
        let (_, rs) = embed_boxes(&boxes).unwrap();
        let ends = |i: usize| [(boxes[i].lo[0].clone(), rs.boxes[i].c1()[0]), (boxes[i].hi[0].clone(), rs.boxes[i].c2()[0])];
        for i in 0..n {
            for j in 0..n {
                for (x, gx) in ends(i) {
                    for (y, gy) in ends(j) {
                        prop_assert_eq!(x.cmp(&y), gx.cmp(&gy));
                    }
                }
            }
        }
    }

    #[test]
    fn greedy_boxes_are_feasible_and_consistent(seed in any::<u64>()) {
        let mut r = rng(seed);
        let dims = vec![rand::Rng::gen_range(&mut r, 1..=4), rand::Rng::gen_range(&mut r, 1..=4)];
        let field = random_field(&mut r, &dims, 2);
        let f = random_poly(&mut r, 2);
        let eps = q(1, 4);
        let res = compress_greedy(&field, &f, &eps).unwrap();
        let energies: Vec<Q> = field.data().iter().map(|x| f.eval(x).unwrap()).collect();
        let es = res.payload.eps_star().clone();
        for e in res.payload.entries() {
            let idx = box_cells(&dims, &e.bx);
            prop_assert!(spread(&energies, &idx) <= &es * qi(2));
            prop_assert!(spread(&energies, &idx) <= &eps * qi(2));
            for &i in &idx {
                prop_assert!((&energies[i] - &e.summary).abs() <= es);
            }
        }
        let recon = decompress(&res.codeword).unwrap();
        prop_assert!(verify_index_consistency(&field, &recon, &f, &eps).unwrap().is_empty());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn exact_count_monotone_in_eps(seed in any::<u64>()) {
        let mut r = rng(seed);
        let field = random_field(&mut r, &[2, 3], 1);
        let f = voxbox_core::poly::parse_polynomial("x1", 1).unwrap();
        let mut last = usize::MAX;
        for eps in [q(1, 20), q(1, 4), q(1, 2), q(9, 10)] {
            let n = compress_exact(&field, &f, &eps, 6).unwrap().payload.entries().len();
            prop_assert!(n <= last);
            last = n;
        }
    }
}
