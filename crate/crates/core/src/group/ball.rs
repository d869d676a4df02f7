use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::One;

use super::{IndexSet, Point, PointSet, Representation};
use crate::error::{Error, Result};

/// Hamming norm `‖x‖`.
pub fn hamming_norm(x: Point) -> u32 {
    x.norm()
}

/// `H_r(I)`: all points with at most `r` ones.
pub fn hamming_ball(ctx: Arc<IndexSet>, r: usize) -> Result<PointSet> {
    hamming_ball_with(ctx, r, Representation::Auto)
}

pub fn hamming_ball_with(ctx: Arc<IndexSet>, r: usize, rep: Representation) -> Result<PointSet> {
    let n = ctx.dim();
    if r > n {
        return Err(Error::out_of_range("r", r, format!("0..={n}")));
    }
    let dense = match rep {
        Representation::Auto => n <= super::DENSE_MAX_DIM,
        Representation::Dense => true,
        Representation::Sparse => false,
    };
    if dense {
        PointSet::from_points_with(
            ctx,
            (0u64..1 << n)
                .filter(|x| x.count_ones() as usize <= r)
                .map(Point),
            Representation::Dense,
        )
    } else {
        let mut pts = Vec::new();
        for k in 0..=r {
            for_each_weight(n, k, |x| pts.push(Point(x)));
        }
        PointSet::from_points_with(ctx, pts, Representation::Sparse)
    }
}

/// Every `n`-bit word of weight exactly `k`, in increasing order (Gosper's hack).
pub fn for_each_weight(n: usize, k: usize, mut f: impl FnMut(u64)) {
    if k > n {
        return;
    }
    if k == 0 {
        f(0);
        return;
    }
    let limit = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let mut x: u64 = if k == 64 { u64::MAX } else { (1u64 << k) - 1 };
    loop {
        f(x);
        let c = x & x.wrapping_neg();
        let (r, overflow) = x.overflowing_add(c);
        if overflow || r == 0 {
            return;
        }
        let next = (((r ^ x) >> 2) / c) | r;
        if next > limit {
            return;
        }
        x = next;
    }
}

/// `C(n, k)` exactly.
pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::default();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// `|H_r(n)| = Σ_{k ≤ r} C(n, k)`, with `r` clamped to `n`.
pub fn ball_size(n: u64, r: u64) -> BigUint {
    (0..=r.min(n)).map(|k| binomial(n, k)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(n: usize) -> Arc<IndexSet> {
        Arc::new(IndexSet::standard(n).unwrap())
    }

    #[test]
    fn small_balls() {
        let h1 = hamming_ball(ctx(3), 1).unwrap();
        assert_eq!(h1.points(), vec![Point(0), Point(1), Point(2), Point(4)]);
        assert_eq!(hamming_ball(ctx(5), 0).unwrap().points(), vec![Point(0)]);
        assert_eq!(hamming_ball(ctx(4), 2).unwrap().len(), 11);
        assert!(hamming_ball(ctx(3), 4).is_err());
    }

    #[test]
    fn sizes_match_binomial_sums() {
        for n in 0..=12usize {
            for r in 0..=n {
                let want = ball_size(n as u64, r as u64);
                assert_eq!(BigUint::from(hamming_ball(ctx(n), r).unwrap().len()), want);
                let sparse = hamming_ball_with(ctx(n), r, Representation::Sparse).unwrap();
                assert_eq!(BigUint::from(sparse.len()), want);
            }
        }
    }

    #[test]
    fn sparse_ball_in_high_dimension() {
        let b = hamming_ball(ctx(40), 2).unwrap();
        assert!(!b.is_dense());
        assert_eq!(b.len(), 1 + 40 + 780);
        assert_eq!(hamming_ball(ctx(64), 1).unwrap().len(), 65);
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), BigUint::from(10u32));
        assert_eq!(binomial(3, 4), BigUint::default());
        assert_eq!(binomial(64, 32), BigUint::from(1832624140942590534u64));
        assert_eq!(ball_size(3, 10), BigUint::from(8u32));
    }
}
