use std::collections::HashSet;
use std::sync::Arc;

use f2add_core::expansion::{
    bog_condition, check_downset_bog, check_expansion, check_hamming_expand, defect, q_exact,
};
use f2add_core::group::{affine_hull, doubling, hamming_ball, iterated_sumset, sum_all, sumset};
use f2add_core::lex::{compress_to_fixpoint, is_smd};
use f2add_core::sample::{downset_closure, random_downset, random_nonempty_set, random_subset};
use f2add_core::scan::{
    enumerate_smds, g_exact, plunnecke_check, ruzsa_cover, set_to_mask, smd_masks,
    tau_hamming_ball, tau_smd,
};
use f2add_core::{IndexSet, Point, PointSet};
use num_bigint::BigUint;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn ctx(n: usize) -> Arc<IndexSet> {
    Arc::new(IndexSet::standard(n).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn defect_is_symmetric(n in 0usize..=64, x in any::<u64>(), y in any::<u64>(), z in any::<u64>()) {
        let m = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
        let (x, y, z) = (Point(x & m), Point(y & m), Point(z & m));
        let d = defect(n, x, y, z);
        for (a, b, c) in [(y, x, z), (z, y, x), (x, z, y), (y, z, x), (z, x, y)] {
            prop_assert_eq!(defect(n, a, b, c), d);
        }
        prop_assert_eq!(d.witness.norm() + d.defect, n as u32);
    }

    #[test]
    fn defect_monotone(n in 1usize..=64, x in any::<u64>(), y in any::<u64>(), z in any::<u64>(), bit in 0usize..64) {
        let m = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
        let bit = bit % n;
        let base = defect(n, Point(x & m), Point(y & m), Point(z & m)).defect;
        let more = defect(n, Point((x | 1 << bit) & m), Point(y & m), Point(z & m)).defect;
        prop_assert!(more <= base);
    }
}

#[test]
fn defect_witness_lies_in_triple_sumset() {
    for n in 1..=4usize {
        let smds = enumerate_smds(n).unwrap();
        let nonempty: Vec<&PointSet> = smds.iter().filter(|a| !a.is_empty()).collect();
        for (i, a) in nonempty.iter().enumerate() {
            for b in nonempty.iter().skip(i).step_by(3) {
                for c in nonempty.iter().step_by(5) {
                    let total = sum_all(&[a, b, c]).unwrap();
                    for x in a.iter() {
                        for y in b.iter() {
                            for z in c.iter() {
                                assert!(total.contains(defect(n, x, y, z).witness));
                            }
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn q_is_multiplicative() {
    for r in 0..10 {
        for s in 0..10 {
            let lhs = q_exact(r + s).unwrap();
            assert!((lhs - q_exact(r).unwrap() * q_exact(s).unwrap()).abs() <= 1e-12);
        }
    }
}

#[test]
fn hamming_expand_exhaustive_in_h1_4() {
    let ball = hamming_ball(ctx(4), 1).unwrap();
    let pts = ball.points();
    let subsets: Vec<PointSet> = (1u32..1 << pts.len())
        .map(|m| {
            PointSet::from_points(
                ctx(4),
                (0..pts.len()).filter(|i| m >> i & 1 == 1).map(|i| pts[i]),
            )
            .unwrap()
        })
        .collect();
    for a in &subsets {
        for b in &subsets {
            assert!(check_hamming_expand(a, b, 1).unwrap().holds);
        }
    }
}

#[test]
fn bog_and_expansion_random() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let mut witnessed = 0;
    for i in 0..300 {
        let n = 2 + i % 7;
        let c = ctx(n);
        let r = (i / 7) % 5;
        let sets: Vec<PointSet> = (0..3)
            .map(|_| random_downset(&c, &mut rng).unwrap())
            .collect();
        if bog_condition(&sets[0], &sets[1], &sets[2], r as u32) {
            let w = check_downset_bog(&sets[0], &sets[1], &sets[2], r as u32).unwrap();
            assert!(w.norm as i64 >= n as i64 - r as i64);
            witnessed += 1;
        }
        if r <= n {
            let plain: Vec<PointSet> = (0..3)
                .map(|_| random_nonempty_set(&c, &mut rng).unwrap())
                .collect();
            assert!(
                check_expansion(&plain[0], &plain[1], &plain[2], r as u32)
                    .unwrap()
                    .holds
            );
        }
    }
    assert!(witnessed > 20);
}

#[test]
fn hamming_expand_random_h2_8() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let ball = hamming_ball(ctx(8), 2).unwrap();
    for _ in 0..200 {
        let a = random_subset(&ball, 0.3, &mut rng).unwrap();
        let b = random_subset(&ball, 0.3, &mut rng).unwrap();
        assert!(check_hamming_expand(&a, &b, 2).unwrap().holds);
    }
}

#[test]
fn compression_to_smd_keeps_hull_and_doubling() {
    // sets containing 0 and a basis have the full cube as hull, before and after
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for n in 2..=8usize {
        let c = ctx(n);
        for _ in 0..30 {
            let noise = random_nonempty_set(&c, &mut rng).unwrap();
            let a = noise.union(&hamming_ball(c.clone(), 1).unwrap()).unwrap();
            let s = compress_to_fixpoint(&a, 2, Default::default()).unwrap().0;
            assert!(is_smd(&s));
            assert!(affine_hull(&s).unwrap().dim() >= affine_hull(&a).unwrap().dim());
            assert!(doubling(&s).unwrap() <= doubling(&a).unwrap());
        }
    }
}

#[test]
fn g_exact_within_bracket() {
    for n in 1..=5usize {
        for a in enumerate_smds(n)
            .unwrap()
            .into_iter()
            .filter(|a| !a.is_empty())
        {
            let g = g_exact(&a).unwrap().count;
            let hull = 1u64 << affine_hull(&a).unwrap().dim();
            let slice = 1u64 << (usize::BITS - 1 - a.len().leading_zeros());
            assert!(g >= 1);
            assert!(g <= (2 * hull).div_ceil(slice), "n={n} {:?}", a);
        }
    }
}

#[test]
fn g_exact_against_brute_force() {
    // independent oracle: span every n-tuple of vectors
    for n in 1..=4usize {
        for mask in smd_masks(n).unwrap().into_iter().filter(|&m| m != 0) {
            let a = f2add_core::scan::mask_to_set(&ctx(n), mask);
            let pts = a.points();
            let cap = a.len();
            let mut best = usize::MAX;
            for v in 0..1u64 << (n * n) {
                let mut span: HashSet<u64> = HashSet::from([0]);
                for g in (0..n).map(|k| (v >> (k * n)) & ((1 << n) - 1)) {
                    let more: Vec<u64> = span.iter().map(|s| s ^ g).collect();
                    span.extend(more);
                }
                if span.len() > cap {
                    continue;
                }
                let cosets: HashSet<u64> = pts
                    .iter()
                    .map(|p| span.iter().map(|s| s ^ p.0).min().unwrap())
                    .collect();
                best = best.min(cosets.len());
            }
            assert_eq!(
                g_exact(&a).unwrap().count as usize,
                best,
                "n={n} mask={mask:#x}"
            );
        }
    }
}

#[test]
fn tau_matches_binomials() {
    for n in 1..=16usize {
        for s in 0..=n.min(4) {
            let ball = hamming_ball(ctx(n), s).unwrap();
            assert_eq!(
                BigUint::from(tau_smd(&ball).unwrap()),
                tau_hamming_ball(n as u64, s as u64)
            );
        }
    }
}

#[test]
fn ruzsa_on_smds() {
    for n in 1..=5usize {
        for a in enumerate_smds(n)
            .unwrap()
            .into_iter()
            .filter(|a| !a.is_empty())
        {
            let m = usize::BITS as usize - 1 - a.len().leading_zeros() as usize;
            let b = a.restrict_to_low(m);
            let cover = ruzsa_cover(&a, &b).unwrap();
            let ab = sumset(&a, &b).unwrap().len() as u64;
            assert!(cover.count <= ab / b.len() as u64);
        }
    }
}

#[test]
fn plunnecke_on_random_sets() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for i in 0..200 {
        let c = ctx(2 + i % 7);
        let a = random_nonempty_set(&c, &mut rng).unwrap();
        assert!(plunnecke_check(&a).unwrap());
    }
}

#[test]
fn iterated_sums_of_downsets_are_downsets() {
    let c = ctx(6);
    let a = downset_closure(&c, [Point(0b101), Point(0b010010)]).unwrap();
    let three = iterated_sumset(&a, 3).unwrap();
    assert!(f2add_core::lex::is_downset(&three));
    assert!(set_to_mask(&three).is_ok());
}
