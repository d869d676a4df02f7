//! Exhaustive scans over small downsets and shift-minimal downsets, exact
//! covering numbers, and the finite checks built on them.
//!
//! A set in F_2^n with `n ≤ 6` is encoded here as a single `u64` bitmap whose
//! bit `x` is set when the point with bits `x` belongs to the set.

use std::collections::HashSet;
use std::sync::Arc;

use num_bigint::BigUint;
use num_rational::Ratio;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::{
    affine_hull, ball_size, doubling, for_each_subspace, iterated_sumset, stabilizer, sumset,
    AffineSubspace, DoublingRatio, IndexSet, Point, PointSet,
};
use crate::lex::is_smd;

/// Largest dimension for which downsets and SMDs are enumerated.
pub const ENUM_MAX_DIM: usize = 6;

fn universe(n: usize) -> u64 {
    if n == 6 {
        u64::MAX
    } else {
        (1u64 << (1u64 << n)) - 1
    }
}

/// Bitmap (over `2^n` points) of the points whose coordinate `j` is 1.
fn coord_mask(n: usize, j: usize) -> u64 {
    (0..1u64 << n)
        .filter(|x| x >> j & 1 == 1)
        .fold(0, |m, x| m | 1 << x)
}

fn check_enum_dim(n: usize) -> Result<()> {
    if n > ENUM_MAX_DIM {
        return Err(Error::DimensionTooLarge {
            dim: n,
            limit: ENUM_MAX_DIM,
            what: "downset enumeration",
        });
    }
    Ok(())
}

/// Every downset of F_2^n as a bitmap, in a fixed order.
///
/// A downset of F_2^n is a pair `(A_0, A_1)` of downsets of F_2^{n-1}, split
/// by the top coordinate, with `A_1 ⊆ A_0`.
pub fn downset_masks(n: usize) -> Result<Vec<u64>> {
    check_enum_dim(n)?;
    let mut level = vec![0u64, 1];
    for k in 1..=n {
        let half = 1u32 << (k - 1);
        let mut next = Vec::new();
        for &a0 in &level {
            for &a1 in &level {
                if a1 & !a0 == 0 {
                    next.push(a0 | a1 << half);
                }
            }
        }
        level = next;
    }
    Ok(level)
}

/// Every shift-minimal downset of F_2^n as a bitmap, generated directly.
///
/// Besides `A_1 ⊆ A_0`, moving the top coordinate of a point of `A_1` to any
/// empty lower coordinate must land in `A_0`.
pub fn smd_masks(n: usize) -> Result<Vec<u64>> {
    check_enum_dim(n)?;
    let mut level = vec![0u64, 1];
    for k in 1..=n {
        let half = 1u32 << (k - 1);
        let lower: Vec<u64> = (0..k - 1).map(|j| coord_mask(k - 1, j)).collect();
        let mut next = Vec::new();
        for &a0 in &level {
            for &a1 in &level {
                if a1 & !a0 != 0 {
                    continue;
                }
                let up_shifts_ok = lower
                    .iter()
                    .enumerate()
                    .all(|(j, &mj)| ((a1 & !mj) << (1u32 << j)) & !a0 == 0);
                if up_shifts_ok {
                    next.push(a0 | a1 << half);
                }
            }
        }
        level = next;
    }
    Ok(level)
}

/// Converts a bitmap over F_2^n (`n ≤ 6`) into a point set on `{1, …, n}`.
pub fn mask_to_set(ctx: &Arc<IndexSet>, mask: u64) -> PointSet {
    let n = ctx.dim();
    assert!(n <= ENUM_MAX_DIM, "bitmap sets need n <= 6");
    PointSet::from_dense_words(ctx.clone(), vec![mask & universe(n)])
}

pub fn set_to_mask(a: &PointSet) -> Result<u64> {
    check_enum_dim(a.dim())?;
    Ok(a.iter().fold(0, |m, p| m | 1 << p.0))
}

pub fn enumerate_downsets(n: usize) -> Result<Vec<PointSet>> {
    let ctx = Arc::new(IndexSet::standard(n)?);
    Ok(downset_masks(n)?
        .into_iter()
        .map(|m| mask_to_set(&ctx, m))
        .collect())
}

pub fn enumerate_smds(n: usize) -> Result<Vec<PointSet>> {
    let ctx = Arc::new(IndexSet::standard(n)?);
    Ok(smd_masks(n)?
        .into_iter()
        .map(|m| mask_to_set(&ctx, m))
        .collect())
}

/// Minimal translate cover of a set by cosets of one linear subspace.
#[derive(Clone, Debug, Serialize)]
pub struct CoverResult {
    pub subspace: AffineSubspace,
    /// The lex-first point of the set in each coset used.
    pub representatives: Vec<Point>,
    pub count: u64,
}

fn reduce_by(basis: &[u64], mut x: u64) -> u64 {
    for &row in basis {
        if x & (1 << (63 - row.leading_zeros())) != 0 {
            x ^= row;
        }
    }
    x
}

/// Least `t` such that `A` lies in `t` cosets of a linear subspace `V` with `|V| ≤ |A|`,
/// found by trying every such `V`.
pub fn g_exact(a: &PointSet) -> Result<CoverResult> {
    let n = a.dim();
    if n > ENUM_MAX_DIM {
        return Err(Error::DimensionTooLarge {
            dim: n,
            limit: ENUM_MAX_DIM,
            what: "exact covering number",
        });
    }
    if a.is_empty() {
        return Err(Error::Domain("covering number of the empty set".into()));
    }
    let pts: Vec<u64> = a.iter().map(|p| p.0).collect();
    let max_dim = floor_log2(pts.len());
    let mut best: Option<(u64, Vec<u64>)> = None;
    for_each_subspace(n, max_dim, |basis| {
        let mut seen = 0u64;
        for &p in &pts {
            seen |= 1 << reduce_by(basis, p);
        }
        let t = seen.count_ones() as u64;
        if best.as_ref().is_none_or(|(b, _)| t < *b) {
            best = Some((t, basis.to_vec()));
        }
    });
    let (count, basis) = best.expect("the zero subspace is always enumerated");
    let mut seen = 0u64;
    let mut representatives = Vec::new();
    for &p in &pts {
        let r = reduce_by(&basis, p);
        if seen >> r & 1 == 0 {
            seen |= 1 << r;
            representatives.push(Point(p));
        }
    }
    let subspace = AffineSubspace::linear_span(a.ctx().clone(), basis.into_iter().map(Point))?;
    Ok(CoverResult {
        subspace,
        representatives,
        count,
    })
}

/// `⌊log2 |A|⌋`.
fn floor_log2(size: usize) -> usize {
    (usize::BITS - 1 - size.leading_zeros()) as usize
}

fn require_smd(a: &PointSet) -> Result<()> {
    if a.is_empty() {
        return Err(Error::Domain("expected a nonempty set".into()));
    }
    if !is_smd(a) {
        return Err(Error::Precondition(
            "set is not a shift-minimal downset".into(),
        ));
    }
    Ok(())
}

/// Number of translates of F_2^m, `m = ⌊log2 |A|⌋`, needed to cover the SMD `A`:
/// the number of distinct projections onto the coordinates above `m`.
pub fn tau_smd(a: &PointSet) -> Result<u64> {
    require_smd(a)?;
    let m = floor_log2(a.len());
    let tops: HashSet<u64> = a.iter().map(|p| p.0 >> m).collect();
    Ok(tops.len() as u64)
}

/// `τ[H_s(n)] = |H_s(n − m)|` with `m = ⌊log2 |H_s(n)|⌋`, by binomial sums.
pub fn tau_hamming_ball(n: u64, s: u64) -> BigUint {
    let size = ball_size(n, s);
    let m = size.bits() - 1;
    ball_size(n - m, s)
}

/// `|A ∩ F_2^m| / |A|` with `m = ⌊log2 |A|⌋`.
pub fn base_intersection_ratio(a: &PointSet) -> Result<Ratio<u64>> {
    require_smd(a)?;
    let m = floor_log2(a.len());
    Ok(Ratio::new(
        a.restrict_to_low(m).len() as u64,
        a.len() as u64,
    ))
}

#[derive(Clone, Debug, Serialize)]
pub struct RuzsaCover {
    pub representatives: Vec<Point>,
    pub count: u64,
    /// `|B + B|`; the representatives' translates of `B + B` cover `A`.
    pub difference_set_size: u64,
    /// `|A + B| / |B|`.
    #[serde(serialize_with = "crate::ratio::serialize")]
    pub bound: Ratio<u64>,
}

/// Greedy maximal family `a_1, …, a_t ∈ A` (scanned in lex order) whose translates
/// `a_i + B` are pairwise disjoint, verified to cover `A` by the `a_i + (B + B)`.
pub fn ruzsa_cover(a: &PointSet, b: &PointSet) -> Result<RuzsaCover> {
    a.check_same_ctx(b)?;
    if a.is_empty() || b.is_empty() {
        return Err(Error::Domain("covering needs nonempty sets".into()));
    }
    let bs: Vec<u64> = b.iter().map(|p| p.0).collect();
    let mut occupied: HashSet<u64> = HashSet::new();
    let mut reps = Vec::new();
    for x in a.iter() {
        if bs.iter().all(|&y| !occupied.contains(&(x.0 ^ y))) {
            occupied.extend(bs.iter().map(|&y| x.0 ^ y));
            reps.push(x);
        }
    }
    let bb = sumset(b, b)?;
    let rep_set = PointSet::from_points(a.ctx().clone(), reps.iter().copied())?;
    let covered = sumset(&rep_set, &bb)?;
    if !a.is_subset(&covered)? {
        return Err(Error::Contradiction(
            "greedy translates fail to cover A".into(),
        ));
    }
    let ab = sumset(a, b)?;
    let bound = Ratio::new(ab.len() as u64, b.len() as u64);
    let count = reps.len() as u64;
    if Ratio::from_integer(count) > bound {
        return Err(Error::Contradiction(format!(
            "{count} disjoint translates exceed |A+B|/|B| = {bound}"
        )));
    }
    Ok(RuzsaCover {
        representatives: reps,
        count,
        difference_set_size: bb.len() as u64,
        bound,
    })
}

/// One nonempty SMD in a scan.
#[derive(Clone, Debug, Serialize)]
pub struct ScanRecord {
    pub points: Vec<Point>,
    pub n: usize,
    pub size: u64,
    pub sigma: DoublingRatio,
    pub hull_dim: usize,
    /// `2^{dim hull} / |A|`.
    #[serde(serialize_with = "crate::ratio::serialize")]
    pub hull_ratio: Ratio<u64>,
    pub g_exact: Option<u64>,
    #[serde(serialize_with = "crate::ratio::serialize")]
    pub base_ratio: Ratio<u64>,
}

impl ScanRecord {
    pub fn of(a: &PointSet, with_cover: bool) -> Result<ScanRecord> {
        let hull = affine_hull(a)?;
        let size = a.len() as u64;
        Ok(ScanRecord {
            points: a.points(),
            n: a.dim(),
            size,
            sigma: doubling(a)?,
            hull_dim: hull.dim(),
            hull_ratio: Ratio::new(1u64 << hull.dim(), size),
            g_exact: if with_cover {
                Some(g_exact(a)?.count)
            } else {
                None
            },
            base_ratio: base_intersection_ratio(a)?,
        })
    }

    pub fn hull_size(&self) -> u64 {
        1 << self.hull_dim
    }
}

/// Running maxima over records with doubling at most `k`.
#[derive(Clone, Debug, Serialize)]
pub struct EnvelopePoint {
    #[serde(serialize_with = "crate::ratio::serialize")]
    pub k: Ratio<u64>,
    #[serde(serialize_with = "crate::ratio::serialize")]
    pub hull_ratio: Ratio<u64>,
    pub g_exact: Option<u64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct FScan {
    pub n: usize,
    pub records: Vec<ScanRecord>,
    /// A lower bound for the blow-up and covering functions at this dimension only.
    pub envelope: Vec<EnvelopePoint>,
}

/// Records every nonempty SMD of F_2^n with its doubling, hull and cover data.
pub fn f_scan(n: usize) -> Result<FScan> {
    let smds = enumerate_smds(n)?;
    let records: Vec<ScanRecord> = smds
        .par_iter()
        .filter(|a| !a.is_empty())
        .map(|a| ScanRecord::of(a, true))
        .collect::<Result<_>>()?;
    Ok(FScan {
        n,
        envelope: envelope(&records),
        records,
    })
}

pub fn envelope(records: &[ScanRecord]) -> Vec<EnvelopePoint> {
    let mut sorted: Vec<&ScanRecord> = records.iter().collect();
    sorted.sort_by_key(|r| r.sigma);
    let mut out: Vec<EnvelopePoint> = Vec::new();
    for r in sorted {
        let k = r.sigma.value();
        let (mut hull, mut g) = out
            .last()
            .map_or((Ratio::zero(), None), |p| (p.hull_ratio, p.g_exact));
        hull = hull.max(r.hull_ratio);
        g = match (g, r.g_exact) {
            (Some(x), Some(y)) => Some(x.max(y)),
            (x, y) => x.or(y),
        };
        match out.last_mut() {
            Some(p) if p.k == k => {
                p.hull_ratio = hull;
                p.g_exact = g;
            }
            _ => out.push(EnvelopePoint {
                k,
                hull_ratio: hull,
                g_exact: g,
            }),
        }
    }
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct IndependentPoints {
    #[serde(skip)]
    pub set: PointSet,
    pub r: usize,
    pub sumset_size: u64,
    pub sigma: DoublingRatio,
    pub hull_dim: usize,
}

/// `{0, e_1, …, e_r}` with `r = ⌊2K − 1⌋`, stored sparsely.
pub fn independent_points(k: Ratio<u64>) -> Result<IndependentPoints> {
    if k < Ratio::from_integer(1) {
        return Err(Error::out_of_range("K", k, "K >= 1"));
    }
    let r = (k * 2 - 1).to_integer() as usize;
    if r > 64 {
        return Err(Error::DimensionTooLarge {
            dim: r,
            limit: 64,
            what: "independent points",
        });
    }
    let ctx = Arc::new(IndexSet::standard(r)?);
    let set = PointSet::from_points_with(
        ctx,
        std::iter::once(Point::ZERO).chain((0..r).map(Point::basis)),
        crate::group::Representation::Sparse,
    )?;
    let ss = sumset(&set, &set)?;
    Ok(IndependentPoints {
        r,
        sumset_size: ss.len() as u64,
        sigma: DoublingRatio::new(ss.len() as u64, set.len() as u64)?,
        hull_dim: affine_hull(&set)?.dim(),
        set,
    })
}

/// The exact blow-up for small doubling: `K` below 7/4, `8K/7` on `[7/4, 9/5)`.
pub fn small_k_formula(k: Ratio<u64>) -> Result<Ratio<u64>> {
    let one = Ratio::from_integer(1);
    if k < one || k >= Ratio::new(9, 5) {
        return Err(Error::out_of_range("K", k, "1 <= K < 9/5"));
    }
    if k < Ratio::new(7, 4) {
        Ok(k)
    } else {
        Ok(k * Ratio::new(8, 7))
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct KneserReport {
    pub set_size: u64,
    pub sumset_size: u64,
    pub stabilizer_size: u64,
    pub holds: bool,
}

/// `|A + A| ≥ 2|A| − |H|` with `H` the stabilizer of `A + A`.
pub fn kneser_check(a: &PointSet) -> Result<KneserReport> {
    if a.is_empty() {
        return Err(Error::Domain("Kneser check of the empty set".into()));
    }
    let ss = sumset(a, a)?;
    let h = stabilizer(&ss)?;
    let stabilizer_size = 1u64 << h.dim();
    let sumset_size = ss.len() as u64;
    let set_size = a.len() as u64;
    Ok(KneserReport {
        set_size,
        sumset_size,
        stabilizer_size,
        holds: sumset_size + stabilizer_size >= 2 * set_size,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct CubeLemmaRow {
    pub n: u64,
    /// `|H_1(n)| = n + 1`.
    pub b_size: u64,
    /// `|H_1(n) + H_1(n)| = |H_2(n)|`.
    pub sumset_size: u64,
    pub ratio: f64,
    /// `(n − 1)/2`.
    pub target: f64,
    /// Whether `|H_1(n)| ≤ n^C`.
    pub admissible: bool,
    pub holds: bool,
}

/// `|A + B|/|B|` for `A = B = H_1(n)` against `(n − 1)/2`, from binomials.
pub fn cube_lemma_row(n: u64, c: f64) -> CubeLemmaRow {
    let b = ball_size(n, 1);
    let s = ball_size(n, 2);
    let holds = s.clone() * 2u32 >= b.clone() * n.saturating_sub(1);
    let b = b.to_u64().expect("n + 1 fits");
    let s = s.to_u64().expect("|H_2(n)| fits for n < 2^31");
    CubeLemmaRow {
        n,
        b_size: b,
        sumset_size: s,
        ratio: s as f64 / b as f64,
        target: n.saturating_sub(1) as f64 / 2.0,
        admissible: (b as f64) <= (n as f64).powf(c),
        holds,
    }
}

pub fn cube_lemma_report(ns: impl IntoIterator<Item = u64>, c: f64) -> Vec<CubeLemmaRow> {
    ns.into_iter().map(|n| cube_lemma_row(n, c)).collect()
}

/// Ratio `|A + B|/|B|` of an explicit instance with `H_1(n) ⊆ B ⊆ A`.
pub fn cube_lemma_instance(a: &PointSet, b: &PointSet) -> Result<Ratio<u64>> {
    let h1 = crate::group::hamming_ball(a.ctx().clone(), 1.min(a.dim()))?;
    if !h1.is_subset(b)? || !b.is_subset(a)? {
        return Err(Error::Precondition("expected H_1(n) ⊆ B ⊆ A".into()));
    }
    Ok(Ratio::new(sumset(a, b)?.len() as u64, b.len() as u64))
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct PPropReport {
    pub max_norm: u32,
    pub log2_size: f64,
    /// `log2 |A| − max norm in A + A + A`.
    pub gap: f64,
}

/// Largest Hamming norm in `A + A + A` against `log2 |A|`.
pub fn pprop_check(a: &PointSet) -> Result<PPropReport> {
    if a.is_empty() {
        return Err(Error::Domain("expected a nonempty set".into()));
    }
    let triple = iterated_sumset(a, 3)?;
    let max_norm = triple.max_norm().expect("nonempty");
    let log2_size = (a.len() as f64).log2();
    Ok(PPropReport {
        max_norm,
        log2_size,
        gap: log2_size - max_norm as f64,
    })
}

/// `|5A| ≤ σ^5 |A|`, checked as `|5A|·|A|^4 ≤ |A + A|^5`.
pub fn plunnecke_check(a: &PointSet) -> Result<bool> {
    if a.is_empty() {
        return Err(Error::Domain("expected a nonempty set".into()));
    }
    let five = BigUint::from(iterated_sumset(a, 5)?.len());
    let two = BigUint::from(iterated_sumset(a, 2)?.len());
    let size = BigUint::from(a.len());
    Ok(five * size.pow(4) <= two.pow(5))
}
