use std::collections::HashSet;
use std::sync::Arc;

use serde::Serialize;

use super::bits::{self, low_mask};
use super::{IndexSet, Point, PointSet};
use crate::error::{Error, Result};

/// An affine subspace `offset + span(basis)` of F_2^I.
///
/// The basis is kept in reduced row-echelon form: every vector's pivot is its
/// highest set bit, pivots strictly increase along the basis, and no other
/// basis vector has a one in a pivot column. The offset is reduced against the
/// basis, so equal subspaces have equal representations.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct AffineSubspace {
    ctx: Arc<IndexSet>,
    offset: Point,
    basis: Vec<u64>,
}

/// Reduced row-echelon basis under construction.
#[derive(Clone, Debug)]
pub(crate) struct Echelon {
    /// `rows[p]` is the vector whose pivot is bit `p`, or 0.
    rows: [u64; 64],
    pivots: u64,
    rank: usize,
}

impl Default for Echelon {
    fn default() -> Self {
        Echelon {
            rows: [0; 64],
            pivots: 0,
            rank: 0,
        }
    }
}

impl Echelon {
    /// Clears every pivot column of `x`; the result is the canonical coset representative.
    pub(crate) fn reduce(&self, mut x: u64) -> u64 {
        let mut pivots = self.pivots & x;
        while pivots != 0 {
            let p = pivots.trailing_zeros() as usize;
            pivots &= pivots - 1;
            if x >> p & 1 == 1 {
                x ^= self.rows[p];
            }
        }
        x
    }

    /// Adds `x` to the span; returns false if it was already there.
    pub(crate) fn insert(&mut self, x: u64) -> bool {
        let r = self.reduce(x);
        if r == 0 {
            return false;
        }
        let p = 63 - r.leading_zeros() as usize;
        // clear column p in the other rows to stay fully reduced
        for q in p + 1..64 {
            if self.rows[q] >> p & 1 == 1 {
                self.rows[q] ^= r;
            }
        }
        self.rows[p] = r;
        self.pivots |= 1 << p;
        self.rank += 1;
        true
    }

    pub(crate) fn rank(&self) -> usize {
        self.rank
    }

    pub(crate) fn basis(&self) -> Vec<u64> {
        self.rows.iter().copied().filter(|&v| v != 0).collect()
    }
}

impl AffineSubspace {
    /// The linear span of `vectors`.
    pub fn linear_span(
        ctx: Arc<IndexSet>,
        vectors: impl IntoIterator<Item = Point>,
    ) -> Result<Self> {
        Self::span_from(ctx, Point::ZERO, vectors)
    }

    /// `offset + span(directions)`.
    pub fn span_from(
        ctx: Arc<IndexSet>,
        offset: Point,
        directions: impl IntoIterator<Item = Point>,
    ) -> Result<Self> {
        let valid = low_mask(ctx.dim());
        let mut ech = Echelon::default();
        let outside = |v: Point| Error::Domain(format!("vector {:#b} outside {}", v.0, ctx));
        if offset.0 & !valid != 0 {
            return Err(outside(offset));
        }
        for v in directions {
            if v.0 & !valid != 0 {
                return Err(outside(v));
            }
            ech.insert(v.0);
        }
        Ok(Self::from_echelon(ctx, offset, &ech))
    }

    pub(crate) fn from_echelon(ctx: Arc<IndexSet>, offset: Point, ech: &Echelon) -> Self {
        AffineSubspace {
            ctx,
            offset: Point(ech.reduce(offset.0)),
            basis: ech.basis(),
        }
    }

    pub fn ctx(&self) -> &Arc<IndexSet> {
        &self.ctx
    }

    pub fn offset(&self) -> Point {
        self.offset
    }

    pub fn basis(&self) -> Vec<Point> {
        self.basis.iter().map(|&b| Point(b)).collect()
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// `2^dim`.
    pub fn cardinality(&self) -> u128 {
        1u128 << self.dim()
    }

    pub fn is_linear(&self) -> bool {
        self.offset.is_zero()
    }

    /// Canonical representative of the coset `x + L` of the direction space `L`.
    pub fn reduce(&self, x: Point) -> Point {
        let mut v = x.0;
        for &b in self.basis.iter().rev() {
            let p = 63 - b.leading_zeros();
            if v >> p & 1 == 1 {
                v ^= b;
            }
        }
        Point(v)
    }

    pub fn contains(&self, x: Point) -> bool {
        self.reduce(x ^ self.offset).is_zero()
    }

    /// The direction space (offset dropped).
    pub fn direction(&self) -> AffineSubspace {
        AffineSubspace {
            ctx: self.ctx.clone(),
            offset: Point::ZERO,
            basis: self.basis.clone(),
        }
    }

    /// All `2^dim` members, as a set.
    pub fn to_point_set(&self) -> Result<PointSet> {
        let d = self.dim();
        if d > super::point_set::DENSE_HARD_LIMIT {
            return Err(Error::DimensionTooLarge {
                dim: d,
                limit: super::point_set::DENSE_HARD_LIMIT,
                what: "subspace enumeration",
            });
        }
        let pts = (0u64..1 << d).map(|c| {
            let mut v = self.offset.0;
            for (k, &b) in self.basis.iter().enumerate() {
                if c >> k & 1 == 1 {
                    v ^= b;
                }
            }
            Point(v)
        });
        PointSet::from_points(self.ctx.clone(), pts)
    }

    /// Whether every point of `a` lies in this subspace.
    pub fn contains_set(&self, a: &PointSet) -> bool {
        a.iter().all(|p| self.contains(p))
    }

    /// Whether `self ⊆ other`.
    pub fn is_subspace_of(&self, other: &AffineSubspace) -> bool {
        other.contains(self.offset) && self.basis.iter().all(|&b| other.reduce(Point(b)).is_zero())
    }

    pub fn same_span_as(&self, other: &AffineSubspace) -> bool {
        self.dim() == other.dim() && self.is_subspace_of(other)
    }
}

impl std::fmt::Debug for AffineSubspace {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let n = self.ctx.dim();
        write!(f, "{} + span[", self.offset.to_bit_string(n))?;
        for (k, b) in self.basis.iter().enumerate() {
            if k > 0 {
                f.write_str(", ")?;
            }
            f.write_str(&Point(*b).to_bit_string(n))?;
        }
        f.write_str("]")
    }
}

impl Serialize for AffineSubspace {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let n = self.ctx.dim();
        let mut st = s.serialize_struct("AffineSubspace", 3)?;
        st.serialize_field("dimension", &self.dim())?;
        st.serialize_field("offset", &self.offset.to_bit_string(n))?;
        let basis: Vec<String> = self
            .basis
            .iter()
            .map(|&b| Point(b).to_bit_string(n))
            .collect();
        st.serialize_field("basis", &basis)?;
        st.end()
    }
}

/// Smallest affine subspace containing the nonempty set `A`.
pub fn affine_hull(a: &PointSet) -> Result<AffineSubspace> {
    let a0 = a
        .first()
        .ok_or_else(|| Error::Domain("affine hull of the empty set".into()))?;
    let mut ech = Echelon::default();
    let full = a.dim();
    for p in a.iter() {
        ech.insert((p ^ a0).0);
        if ech.rank() == full {
            break;
        }
    }
    Ok(AffineSubspace::from_echelon(a.ctx().clone(), a0, &ech))
}

/// The stabilizer `{h : h + S = S}` of a nonempty set, as a linear subspace.
pub fn stabilizer(s: &PointSet) -> Result<AffineSubspace> {
    if s.is_empty() {
        return Err(Error::Domain("stabilizer of the empty set".into()));
    }
    let n = s.dim();
    let size = s.len() as i64;
    let members: Vec<Point> = if n <= super::sumset::TRANSFORM_MAX_DIM && s.len() > 64 {
        // h stabilizes S iff it has |S| representations as a difference in S
        let conv = super::sumset::representation_counts(s, s)?;
        conv.iter()
            .enumerate()
            .filter(|&(_, &c)| c == size)
            .map(|(h, _)| Point(h as u64))
            .collect()
    } else {
        stabilizer_members_direct(s)
    };
    let mut ech = Echelon::default();
    for h in members {
        ech.insert(h.0);
    }
    Ok(AffineSubspace::from_echelon(
        s.ctx().clone(),
        Point::ZERO,
        &ech,
    ))
}

/// Candidates are `s0 + s`; each is tested by translating the whole set.
fn stabilizer_members_direct(s: &PointSet) -> Vec<Point> {
    let s0 = s.first().expect("nonempty");
    let lookup: HashSet<u64> = s.iter().map(|p| p.0).collect();
    let mut ech = Echelon::default();
    let mut out = Vec::new();
    for t in s.iter() {
        let h = (s0 ^ t).0;
        if ech.reduce(h) == 0 {
            continue;
        }
        if s.iter().all(|p| lookup.contains(&(p.0 ^ h))) {
            ech.insert(h);
            out.push(Point(h));
        }
    }
    out
}

/// Number of linear subspaces of F_2^n of every dimension (Gaussian binomials).
pub fn gaussian_binomial_2(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let mut num: u128 = 1;
    let mut den: u128 = 1;
    for i in 0..k {
        num *= (1u128 << (n - i)) - 1;
        den *= (1u128 << (i + 1)) - 1;
    }
    num / den
}

/// Calls `f` once per linear subspace of F_2^n of dimension at most `max_dim`,
/// passing its reduced row-echelon basis. Enumeration is by pivot set, then by
/// assignment of the free entries below each pivot.
pub fn for_each_subspace(n: usize, max_dim: usize, mut f: impl FnMut(&[u64])) {
    let max_dim = max_dim.min(n);
    let mut basis = Vec::with_capacity(max_dim);
    for k in 0..=max_dim {
        for_each_pivot_set(n, k, &mut |pivots| {
            let pivot_mask: u64 = pivots.iter().map(|&p| 1u64 << p).sum();
            // free positions for row i: non-pivot bits below pivot i
            let free: Vec<u64> = pivots.iter().map(|&p| low_mask(p) & !pivot_mask).collect();
            let total_bits: u32 = free.iter().map(|m| m.count_ones()).sum();
            for assignment in 0u64..(1u64 << total_bits) {
                basis.clear();
                let mut shift = 0;
                for (i, &p) in pivots.iter().enumerate() {
                    let width = free[i].count_ones();
                    let chunk = (assignment >> shift) & low_mask(width as usize);
                    shift += width;
                    basis.push((1u64 << p) | bits::deposit(chunk, free[i]));
                }
                f(&basis);
            }
        });
    }
}

fn for_each_pivot_set(n: usize, k: usize, f: &mut dyn FnMut(&[usize])) {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
        if cur.len() == k {
            f(cur);
            return;
        }
        for p in start..n {
            if n - p < k - cur.len() {
                break;
            }
            cur.push(p);
            rec(p + 1, n, k, cur, f);
            cur.pop();
        }
    }
    rec(0, n, k, &mut Vec::with_capacity(k), f);
}
