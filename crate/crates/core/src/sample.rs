//! Seeded random instances for property checks.

use std::sync::Arc;

use rand::Rng;

use crate::error::Result;
use crate::group::{IndexSet, Point, PointSet};
use crate::lex::compress_to_fixpoint;

/// Each point of F_2^n independently with probability `density`.
pub fn random_set(ctx: &Arc<IndexSet>, density: f64, rng: &mut impl Rng) -> Result<PointSet> {
    let n = ctx.dim();
    PointSet::from_points(
        ctx.clone(),
        (0u64..1 << n)
            .filter(|_| rng.random_bool(density))
            .map(Point),
    )
}

/// A random nonempty set whose density is itself drawn uniformly.
pub fn random_nonempty_set(ctx: &Arc<IndexSet>, rng: &mut impl Rng) -> Result<PointSet> {
    let density = rng.random_range(0.02..0.6);
    let a = random_set(ctx, density, rng)?;
    if a.is_empty() {
        let x = rng.random_range(0..1u64 << ctx.dim());
        return PointSet::from_points(ctx.clone(), [Point(x)]);
    }
    Ok(a)
}

/// Each point of `a` independently with probability `keep`.
pub fn random_subset(a: &PointSet, keep: f64, rng: &mut impl Rng) -> Result<PointSet> {
    PointSet::from_points(a.ctx().clone(), a.iter().filter(|_| rng.random_bool(keep)))
}

/// Smallest downset containing the given points.
pub fn downset_closure(
    ctx: &Arc<IndexSet>,
    gens: impl IntoIterator<Item = Point>,
) -> Result<PointSet> {
    let n = ctx.dim();
    let mut member = vec![false; 1 << n];
    for g in gens {
        member[g.0 as usize] = true;
    }
    for x in (0..member.len()).rev() {
        if member[x] {
            let mut rest = x;
            while rest != 0 {
                let low = rest & rest.wrapping_neg();
                member[x ^ low] = true;
                rest ^= low;
            }
        }
    }
    PointSet::from_points(
        ctx.clone(),
        member
            .iter()
            .enumerate()
            .filter(|(_, &m)| m)
            .map(|(x, _)| Point(x as u64)),
    )
}

/// Downward closure of a few random generators; coordinate density varies per call.
pub fn random_downset(ctx: &Arc<IndexSet>, rng: &mut impl Rng) -> Result<PointSet> {
    let n = ctx.dim();
    let p = rng.random_range(0.1..0.7);
    let count = rng.random_range(1..=(2 * n).max(1));
    let gens: Vec<Point> = (0..count)
        .map(|_| {
            Point(
                (0..n)
                    .filter(|_| rng.random_bool(p))
                    .fold(0, |m, i| m | 1 << i),
            )
        })
        .collect();
    downset_closure(ctx, gens)
}

/// A random shift-minimal downset, obtained by 2-compressing a random set.
pub fn random_smd(ctx: &Arc<IndexSet>, rng: &mut impl Rng) -> Result<PointSet> {
    let a = random_nonempty_set(ctx, rng)?;
    if ctx.dim() == 0 {
        return Ok(a);
    }
    Ok(compress_to_fixpoint(&a, 2.min(ctx.dim()), Default::default())?.0)
}
