use std::cmp::Ordering;
use std::fmt;

use num_rational::Ratio;
use serde::Serialize;

use super::bits::{self, words_for};
use super::PointSet;
use crate::error::{Error, Result};

/// Largest dimension for the transform path; keeps every convolution value below 2^60.
pub const TRANSFORM_MAX_DIM: usize = 20;

/// How a sumset is computed. All methods return the same set.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum SumsetMethod {
    /// Pick per call from the operand sizes.
    #[default]
    Auto,
    /// Double loop over all pairs.
    Naive,
    /// OR together the translates `a + B` of a dense bitmap.
    Translate,
    /// XOR-convolution of indicators via Walsh–Hadamard, thresholded at 1.
    Transform,
}

/// `A + B = {a + b}`.
pub fn sumset(a: &PointSet, b: &PointSet) -> Result<PointSet> {
    sumset_with(a, b, SumsetMethod::Auto)
}

pub fn sumset_with(a: &PointSet, b: &PointSet, method: SumsetMethod) -> Result<PointSet> {
    a.check_same_ctx(b)?;
    let n = a.dim();
    if a.is_empty() || b.is_empty() {
        return Ok(a.like(a.is_dense() && b.is_dense(), std::iter::empty()));
    }
    let method = match method {
        SumsetMethod::Auto => choose(a, b),
        m => m,
    };
    match method {
        SumsetMethod::Naive | SumsetMethod::Auto => Ok(naive(a, b)),
        SumsetMethod::Translate => {
            let (da, db) = (a.to_dense()?, b.to_dense()?);
            let (small, large) = if da.len() <= db.len() {
                (&da, &db)
            } else {
                (&db, &da)
            };
            let src = large.dense_words().expect("dense");
            let mut acc = vec![0u64; src.len()];
            for p in small.iter() {
                bits::or_translate_into(src, p.0, &mut acc);
            }
            Ok(PointSet::from_dense_words(a.ctx().clone(), acc))
        }
        SumsetMethod::Transform => {
            if n > TRANSFORM_MAX_DIM {
                return Err(Error::DimensionTooLarge {
                    dim: n,
                    limit: TRANSFORM_MAX_DIM,
                    what: "transform sumset",
                });
            }
            let (da, db) = (a.to_dense()?, b.to_dense()?);
            let conv =
                bits::xor_convolution(da.dense_words().unwrap(), db.dense_words().unwrap(), n);
            let mut words = vec![0u64; words_for(n)];
            for (x, &c) in conv.iter().enumerate() {
                if c >= 1 {
                    words[x >> 6] |= 1 << (x & 63);
                }
            }
            Ok(PointSet::from_dense_words(a.ctx().clone(), words))
        }
    }
}

fn choose(a: &PointSet, b: &PointSet) -> SumsetMethod {
    if !(a.is_dense() && b.is_dense()) {
        return SumsetMethod::Naive;
    }
    let n = a.dim();
    let words = words_for(n) as u64;
    let small = a.len().min(b.len()) as u64;
    let pairs = a.len() as u64 * b.len() as u64;
    // rough operation counts of the three paths
    let naive_cost = pairs;
    let translate_cost = small * words * 8;
    let transform_cost = (3 * (n as u64 + 2)) << n;
    if naive_cost <= translate_cost.min(transform_cost) {
        SumsetMethod::Naive
    } else if translate_cost <= transform_cost || n > TRANSFORM_MAX_DIM {
        SumsetMethod::Translate
    } else {
        SumsetMethod::Transform
    }
}

fn naive(a: &PointSet, b: &PointSet) -> PointSet {
    let dense = a.is_dense() && b.is_dense();
    if dense {
        let mut words = vec![0u64; words_for(a.dim())];
        for x in a.iter() {
            for y in b.iter() {
                let z = x.0 ^ y.0;
                words[(z >> 6) as usize] |= 1 << (z & 63);
            }
        }
        PointSet::from_dense_words(a.ctx().clone(), words)
    } else {
        let mut out = Vec::with_capacity(a.len() * b.len());
        for x in a.iter() {
            out.extend(b.iter().map(|y| x.0 ^ y.0));
        }
        out.sort_unstable();
        out.dedup();
        PointSet::from_sorted(a.ctx().clone(), out)
    }
}

/// The `k`-fold sumset `A + ... + A`.
pub fn iterated_sumset(a: &PointSet, k: usize) -> Result<PointSet> {
    if k < 1 {
        return Err(Error::out_of_range("k", k, "k >= 1"));
    }
    let mut acc = a.clone();
    for _ in 1..k {
        acc = sumset(&acc, a)?;
    }
    Ok(acc)
}

/// Sum of several sets, left to right.
pub fn sum_all(sets: &[&PointSet]) -> Result<PointSet> {
    let (first, rest) = sets
        .split_first()
        .ok_or_else(|| Error::Domain("sum of no sets".into()))?;
    rest.iter()
        .try_fold((*first).clone(), |acc, s| sumset(&acc, s))
}

/// `A ∨ B = {x ∨ y}`.
pub fn join_set(a: &PointSet, b: &PointSet) -> Result<PointSet> {
    a.check_same_ctx(b)?;
    let mut out = Vec::with_capacity(a.len() * b.len());
    for x in a.iter() {
        out.extend(b.iter().map(|y| x.join(y).0));
    }
    Ok(a.like(a.is_dense() && b.is_dense(), out))
}

/// Multiplicity of every `x` as a sum `a + b`; dense dimensions only.
pub fn representation_counts(a: &PointSet, b: &PointSet) -> Result<Vec<i64>> {
    a.check_same_ctx(b)?;
    let n = a.dim();
    if n > TRANSFORM_MAX_DIM {
        return Err(Error::DimensionTooLarge {
            dim: n,
            limit: TRANSFORM_MAX_DIM,
            what: "xor convolution",
        });
    }
    let (da, db) = (a.to_dense()?, b.to_dense()?);
    Ok(bits::xor_convolution(
        da.dense_words().unwrap(),
        db.dense_words().unwrap(),
        n,
    ))
}

/// `|A + A| / |A|` as an exact pair of counts.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct DoublingRatio {
    pub sumset_size: u64,
    pub set_size: u64,
}

impl DoublingRatio {
    pub fn new(sumset_size: u64, set_size: u64) -> Result<Self> {
        if set_size == 0 {
            return Err(Error::Domain("doubling constant of the empty set".into()));
        }
        Ok(DoublingRatio {
            sumset_size,
            set_size,
        })
    }

    /// Reduced rational value.
    pub fn value(self) -> Ratio<u64> {
        Ratio::new(self.sumset_size, self.set_size)
    }

    pub fn to_f64(self) -> f64 {
        self.sumset_size as f64 / self.set_size as f64
    }

    /// Exact comparison with a rational threshold.
    pub fn cmp_ratio(self, k: Ratio<u64>) -> Ordering {
        (self.sumset_size as u128 * *k.denom() as u128)
            .cmp(&(*k.numer() as u128 * self.set_size as u128))
    }

    pub fn le(self, k: Ratio<u64>) -> bool {
        self.cmp_ratio(k) != Ordering::Greater
    }

    pub fn lt(self, k: Ratio<u64>) -> bool {
        self.cmp_ratio(k) == Ordering::Less
    }
}

impl PartialOrd for DoublingRatio {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for DoublingRatio {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.sumset_size as u128 * other.set_size as u128)
            .cmp(&(other.sumset_size as u128 * self.set_size as u128))
            .then_with(|| self.set_size.cmp(&other.set_size))
    }
}

impl fmt::Display for DoublingRatio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.sumset_size, self.set_size)
    }
}

/// The doubling constant `σ[A]`.
pub fn doubling(a: &PointSet) -> Result<DoublingRatio> {
    if a.is_empty() {
        return Err(Error::Domain("doubling constant of the empty set".into()));
    }
    let s = sumset(a, a)?;
    DoublingRatio::new(s.len() as u64, a.len() as u64)
}

/// Whether `A` is a translate of a linear subspace (checked via the hull).
pub fn is_affine_subspace(a: &PointSet) -> bool {
    match super::affine_hull(a) {
        Ok(h) => h.dim() < 64 && (1u64 << h.dim()) == a.len() as u64,
        Err(_) => false,
    }
}
