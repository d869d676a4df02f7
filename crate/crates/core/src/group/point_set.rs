use std::fmt;
use std::sync::Arc;

use super::bits::{self, low_mask, tail_mask, words_for};
use super::{IndexSet, Point};
use crate::error::{Error, Result};

/// Largest dimension stored densely when the representation is chosen automatically.
pub const DENSE_MAX_DIM: usize = 20;

/// Largest dimension for which a dense bitmap may be requested explicitly (32 MiB).
pub const DENSE_HARD_LIMIT: usize = 28;

/// Storage choice for a [`PointSet`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Representation {
    /// Dense when `|I| <= DENSE_MAX_DIM`, sparse otherwise.
    #[default]
    Auto,
    Dense,
    Sparse,
}

#[derive(Clone)]
pub(crate) enum Repr {
    /// Indicator bitmap of length `2^n`.
    Dense(Vec<u64>),
    /// Strictly increasing point list.
    Sparse(Vec<u64>),
}

/// A subset of F_2^I.
#[derive(Clone)]
pub struct PointSet {
    ctx: Arc<IndexSet>,
    repr: Repr,
    len: usize,
}

fn dense_allowed(n: usize) -> Result<()> {
    if n > DENSE_HARD_LIMIT {
        return Err(Error::DimensionTooLarge {
            dim: n,
            limit: DENSE_HARD_LIMIT,
            what: "dense representation",
        });
    }
    Ok(())
}

impl PointSet {
    fn resolve(n: usize, rep: Representation) -> Result<bool> {
        match rep {
            Representation::Auto => Ok(n <= DENSE_MAX_DIM),
            Representation::Dense => dense_allowed(n).map(|_| true),
            Representation::Sparse => Ok(false),
        }
    }

    pub fn empty(ctx: Arc<IndexSet>) -> PointSet {
        Self::empty_with(ctx, Representation::Auto).expect("auto representation always fits")
    }

    pub fn empty_with(ctx: Arc<IndexSet>, rep: Representation) -> Result<PointSet> {
        let n = ctx.dim();
        let repr = if Self::resolve(n, rep)? {
            Repr::Dense(vec![0; words_for(n)])
        } else {
            Repr::Sparse(Vec::new())
        };
        Ok(PointSet { ctx, repr, len: 0 })
    }

    /// All of F_2^I.
    pub fn full(ctx: Arc<IndexSet>) -> Result<PointSet> {
        let n = ctx.dim();
        dense_allowed(n)?;
        let mut words = vec![u64::MAX; words_for(n)];
        words[0] &= tail_mask(n);
        Ok(Self::from_dense_words(ctx, words))
    }

    /// `{0}`.
    pub fn zero(ctx: Arc<IndexSet>) -> PointSet {
        Self::from_points(ctx, [Point::ZERO]).expect("zero is always valid")
    }

    pub fn from_points<I>(ctx: Arc<IndexSet>, points: I) -> Result<PointSet>
    where
        I: IntoIterator<Item = Point>,
    {
        Self::from_points_with(ctx, points, Representation::Auto)
    }

    /// Builds a set; duplicates are merged. Points with bits beyond `|I|` are rejected.
    pub fn from_points_with<I>(
        ctx: Arc<IndexSet>,
        points: I,
        rep: Representation,
    ) -> Result<PointSet>
    where
        I: IntoIterator<Item = Point>,
    {
        let n = ctx.dim();
        let valid = low_mask(n);
        let check = |p: Point| {
            if p.0 & !valid != 0 {
                Err(Error::Domain(format!(
                    "point {:#b} has coordinates outside {}",
                    p.0, ctx
                )))
            } else {
                Ok(p.0)
            }
        };
        if Self::resolve(n, rep)? {
            let mut words = vec![0u64; words_for(n)];
            for p in points {
                let x = check(p)?;
                words[(x >> 6) as usize] |= 1 << (x & 63);
            }
            Ok(Self::from_dense_words(ctx, words))
        } else {
            let mut pts = points
                .into_iter()
                .map(check)
                .collect::<Result<Vec<u64>>>()?;
            pts.sort_unstable();
            pts.dedup();
            Ok(Self::from_sorted(ctx, pts))
        }
    }

    pub(crate) fn from_dense_words(ctx: Arc<IndexSet>, words: Vec<u64>) -> PointSet {
        debug_assert_eq!(words.len(), words_for(ctx.dim()));
        let len = words.iter().map(|w| w.count_ones() as usize).sum();
        PointSet {
            ctx,
            repr: Repr::Dense(words),
            len,
        }
    }

    /// `pts` must be strictly increasing and valid in `ctx`.
    pub(crate) fn from_sorted(ctx: Arc<IndexSet>, pts: Vec<u64>) -> PointSet {
        debug_assert!(pts.windows(2).all(|w| w[0] < w[1]));
        let len = pts.len();
        PointSet {
            ctx,
            repr: Repr::Sparse(pts),
            len,
        }
    }

    /// Builds a set with the same representation kind as `self` (dense only if allowed).
    pub(crate) fn like(&self, dense: bool, pts: impl IntoIterator<Item = u64>) -> PointSet {
        let rep = if dense {
            Representation::Dense
        } else {
            Representation::Sparse
        };
        Self::from_points_with(self.ctx.clone(), pts.into_iter().map(Point), rep)
            .expect("points derived from a valid set stay valid")
    }

    pub(crate) fn dense_words(&self) -> Option<&[u64]> {
        match &self.repr {
            Repr::Dense(w) => Some(w),
            Repr::Sparse(_) => None,
        }
    }

    pub fn ctx(&self) -> &Arc<IndexSet> {
        &self.ctx
    }

    pub fn dim(&self) -> usize {
        self.ctx.dim()
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn is_dense(&self) -> bool {
        matches!(self.repr, Repr::Dense(_))
    }

    pub fn contains(&self, p: Point) -> bool {
        match &self.repr {
            Repr::Dense(w) => {
                p.0 <= low_mask(self.dim()) && w[(p.0 >> 6) as usize] >> (p.0 & 63) & 1 == 1
            }
            Repr::Sparse(v) => v.binary_search(&p.0).is_ok(),
        }
    }

    /// Members in ascending lex order.
    pub fn iter(&self) -> Iter<'_> {
        match &self.repr {
            Repr::Dense(w) => Iter::Dense {
                words: w,
                index: 0,
                current: w.first().copied().unwrap_or(0),
            },
            Repr::Sparse(v) => Iter::Sparse(v.iter()),
        }
    }

    pub fn points(&self) -> Vec<Point> {
        self.iter().collect()
    }

    /// Smallest member in lex order.
    pub fn first(&self) -> Option<Point> {
        self.iter().next()
    }

    pub fn to_dense(&self) -> Result<PointSet> {
        match self.repr {
            Repr::Dense(_) => Ok(self.clone()),
            Repr::Sparse(_) => {
                Self::from_points_with(self.ctx.clone(), self.iter(), Representation::Dense)
            }
        }
    }

    pub fn to_sparse(&self) -> PointSet {
        match &self.repr {
            Repr::Sparse(_) => self.clone(),
            Repr::Dense(_) => {
                Self::from_sorted(self.ctx.clone(), self.iter().map(|p| p.0).collect())
            }
        }
    }

    /// Fails unless both sets live in the same F_2^I.
    pub fn check_same_ctx(&self, other: &PointSet) -> Result<()> {
        if Arc::ptr_eq(&self.ctx, &other.ctx) || self.ctx == other.ctx {
            Ok(())
        } else {
            Err(Error::ContextMismatch {
                left: self.ctx.to_string(),
                right: other.ctx.to_string(),
            })
        }
    }

    /// `{a + v : a ∈ A}`.
    pub fn translate(&self, v: Point) -> Result<PointSet> {
        if v.0 & !low_mask(self.dim()) != 0 {
            return Err(Error::Domain(format!(
                "translation vector {:#b} outside {}",
                v.0, self.ctx
            )));
        }
        Ok(match &self.repr {
            Repr::Dense(w) => {
                let mut out = vec![0; w.len()];
                bits::translate_into(w, v.0, &mut out);
                PointSet {
                    ctx: self.ctx.clone(),
                    repr: Repr::Dense(out),
                    len: self.len,
                }
            }
            Repr::Sparse(pts) => {
                let mut out: Vec<u64> = pts.iter().map(|x| x ^ v.0).collect();
                out.sort_unstable();
                Self::from_sorted(self.ctx.clone(), out)
            }
        })
    }

    pub fn union(&self, other: &PointSet) -> Result<PointSet> {
        self.check_same_ctx(other)?;
        if let (Repr::Dense(a), Repr::Dense(b)) = (&self.repr, &other.repr) {
            let words = a.iter().zip(b).map(|(x, y)| x | y).collect();
            return Ok(Self::from_dense_words(self.ctx.clone(), words));
        }
        let dense = self.is_dense() && other.is_dense();
        Ok(self.like(dense, self.iter().chain(other.iter()).map(|p| p.0)))
    }

    pub fn intersection(&self, other: &PointSet) -> Result<PointSet> {
        self.check_same_ctx(other)?;
        if let (Repr::Dense(a), Repr::Dense(b)) = (&self.repr, &other.repr) {
            let words = a.iter().zip(b).map(|(x, y)| x & y).collect();
            return Ok(Self::from_dense_words(self.ctx.clone(), words));
        }
        Ok(self.like(
            self.is_dense(),
            self.iter().filter(|&p| other.contains(p)).map(|p| p.0),
        ))
    }

    pub fn is_subset(&self, other: &PointSet) -> Result<bool> {
        self.check_same_ctx(other)?;
        if let (Repr::Dense(a), Repr::Dense(b)) = (&self.repr, &other.repr) {
            return Ok(a.iter().zip(b).all(|(x, y)| x & !y == 0));
        }
        Ok(self.len <= other.len && self.iter().all(|p| other.contains(p)))
    }

    /// Members of `A` that lie in the coordinate subspace spanned by the `m` lowest ranks.
    pub fn restrict_to_low(&self, m: usize) -> PointSet {
        let mask = low_mask(m);
        self.like(
            self.is_dense(),
            self.iter().filter(|p| p.0 & !mask == 0).map(|p| p.0),
        )
    }

    /// Largest Hamming norm of a member.
    pub fn max_norm(&self) -> Option<u32> {
        self.iter().map(Point::norm).max()
    }
}

/// Iterator over the members of a [`PointSet`] in lex order.
pub enum Iter<'a> {
    Dense {
        words: &'a [u64],
        index: usize,
        current: u64,
    },
    Sparse(std::slice::Iter<'a, u64>),
}

impl Iterator for Iter<'_> {
    type Item = Point;

    fn next(&mut self) -> Option<Point> {
        match self {
            Iter::Dense {
                words,
                index,
                current,
            } => loop {
                if *current != 0 {
                    let bit = current.trailing_zeros() as u64;
                    *current &= *current - 1;
                    return Some(Point(((*index as u64) << 6) | bit));
                }
                *index += 1;
                if *index >= words.len() {
                    return None;
                }
                *current = words[*index];
            },
            Iter::Sparse(it) => it.next().map(|&x| Point(x)),
        }
    }
}

impl<'a> IntoIterator for &'a PointSet {
    type Item = Point;
    type IntoIter = Iter<'a>;
    fn into_iter(self) -> Iter<'a> {
        self.iter()
    }
}

impl PartialEq for PointSet {
    fn eq(&self, other: &Self) -> bool {
        if self.check_same_ctx(other).is_err() || self.len != other.len {
            return false;
        }
        match (&self.repr, &other.repr) {
            (Repr::Dense(a), Repr::Dense(b)) => a == b,
            (Repr::Sparse(a), Repr::Sparse(b)) => a == b,
            _ => self.iter().eq(other.iter()),
        }
    }
}

impl Eq for PointSet {}

impl fmt::Debug for PointSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.dim();
        write!(f, "PointSet{}[", self.ctx)?;
        for (k, p) in self.iter().enumerate() {
            if k > 0 {
                f.write_str(" ")?;
            }
            if k == 16 {
                write!(f, "... ({} total)", self.len)?;
                break;
            }
            f.write_str(&p.to_bit_string(n))?;
        }
        f.write_str("]")
    }
}
