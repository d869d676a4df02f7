//! Lex order, initial segments, the Hopf–Stiefel function and `J`-compressions.
//!
//! A subset `J ⊆ I` is passed either as a list of labels or, in the `_mask`
//! variants, as a bitmask over coordinate ranks. Inside a fibre F_2^J the
//! coordinates keep their ascending label order, so the lex order on the fibre
//! is the integer order of the extracted bits.

use std::sync::Arc;

use num_bigint::BigUint;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::bits::{extract, low_mask, words_for};
use crate::group::{for_each_weight, IndexSet, Point, PointSet, Representation};

/// Position of a point in the lex order, `ρ(x) = Σ x_i 2^{rank(i)}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct LexRank(pub u64);

pub fn lex_rank(x: Point) -> LexRank {
    LexRank(x.lex_rank())
}

/// `x ⪯ y`: at the largest differing coordinate, `y` has the one.
pub fn lex_leq(x: Point, y: Point) -> bool {
    x.0 <= y.0
}

/// The `m` lex-smallest points of F_2^I.
pub fn initial_segment(ctx: Arc<IndexSet>, m: u64) -> Result<PointSet> {
    let n = ctx.dim();
    if n < 64 && m > 1u64 << n {
        return Err(Error::out_of_range("m", m, format!("0..=2^{n}")));
    }
    if n <= crate::group::DENSE_MAX_DIM {
        let mut words = vec![0u64; words_for(n)];
        let full = (m / 64) as usize;
        words[..full].fill(u64::MAX);
        if !m.is_multiple_of(64) {
            words[full] = low_mask((m % 64) as usize);
        }
        Ok(PointSet::from_dense_words(ctx, words))
    } else {
        PointSet::from_points_with(ctx, (0..m).map(Point), Representation::Sparse)
    }
}

/// Whether `A` is an initial segment of the lex order.
pub fn is_initial_segment(a: &PointSet) -> bool {
    a.iter().enumerate().all(|(i, p)| p.0 == i as u64)
}

/// The Hopf–Stiefel function: `|S_r + S_s|` for lex initial segments of sizes `r` and `s`,
/// via `min_j 2^j (⌈r/2^j⌉ + ⌈s/2^j⌉ − 1)`.
pub fn hs(r: u64, s: u64) -> u64 {
    if r == 0 || s == 0 {
        return 0;
    }
    let top = 64 - (r.max(s) - 1).leading_zeros() + 1;
    (0..=top)
        .map(|j| {
            let scale = 1u128 << j;
            let cr = (r as u128).div_ceil(scale);
            let cs = (s as u128).div_ceil(scale);
            scale * (cr + cs - 1)
        })
        .min()
        .expect("nonempty range") as u64
}

fn subset_mask(ctx: &IndexSet, j: &[u32]) -> Result<u64> {
    ctx.mask_of(j)
}

fn check_mask(a: &PointSet, j: u64) -> Result<()> {
    if j & !a.ctx().full_mask() != 0 {
        return Err(Error::Domain(format!(
            "J = {j:#b} is not a subset of {}",
            a.ctx()
        )));
    }
    Ok(())
}

/// The `J`-fibre of `A` at `x ∈ F_2^{I∖J}`: `{y ∈ F_2^J : (x, y) ∈ A}`.
pub fn fibre(a: &PointSet, j: &[u32], x: Point) -> Result<PointSet> {
    let jm = subset_mask(a.ctx(), j)?;
    fibre_mask(a, jm, x)
}

pub fn fibre_mask(a: &PointSet, j: u64, x: Point) -> Result<PointSet> {
    check_mask(a, j)?;
    if x.0 & j != 0 || x.0 & !a.ctx().full_mask() != 0 {
        return Err(Error::Domain(format!(
            "fibre base point {:#b} must lie in F_2^(I∖J)",
            x.0
        )));
    }
    let sub = Arc::new(a.ctx().restrict(j));
    let ys = a
        .iter()
        .filter(|p| p.0 & !j == x.0)
        .map(|p| Point(extract(p.0, j)));
    PointSet::from_points(sub, ys)
}

/// Whether `C_J(A) = A`: every fibre is closed under taking its lex predecessor.
pub fn is_compressed_mask(a: &PointSet, j: u64) -> bool {
    if j == 0 {
        return true;
    }
    a.iter().all(|p| {
        let y = p.0 & j;
        y == 0 || a.contains(Point((p.0 & !j) | (y.wrapping_sub(1) & j)))
    })
}

pub fn is_compressed(a: &PointSet, j: &[u32]) -> Result<bool> {
    Ok(is_compressed_mask(a, subset_mask(a.ctx(), j)?))
}

/// All `J ⊆ I` with `|J| ≤ r`, ordered by size and then by lex order of the indicator.
pub fn compression_schedule(n: usize, r: usize) -> Vec<u64> {
    let mut out = Vec::new();
    for k in 0..=r.min(n) {
        for_each_weight(n, k, |m| out.push(m));
    }
    out
}

/// `A` is `J`-compressed for every `|J| ≤ r`.
pub fn is_r_compressed(a: &PointSet, r: usize) -> Result<bool> {
    let n = a.dim();
    if r > n {
        return Err(Error::out_of_range("r", r, format!("0..={n}")));
    }
    Ok(compression_schedule(n, r)
        .into_iter()
        .all(|j| is_compressed_mask(a, j)))
}

/// `C_J(A)`: each fibre replaced by the lex initial segment of F_2^J of the same size.
pub fn compress(a: &PointSet, j: &[u32]) -> Result<PointSet> {
    let jm = subset_mask(a.ctx(), j)?;
    compress_mask(a, jm)
}

pub fn compress_mask(a: &PointSet, j: u64) -> Result<PointSet> {
    check_mask(a, j)?;
    if j == 0 || is_compressed_mask(a, j) {
        return Ok(a.clone());
    }
    let fibres = fibre_sizes(a, j);
    let mut out = Vec::with_capacity(a.len());
    for (x, count) in fibres {
        let mut y = 0u64;
        for _ in 0..count {
            out.push(x | y);
            // next element of F_2^J in lex order, deposited into J
            y = (y | !j).wrapping_add(1) & j;
        }
    }
    if a.is_dense() {
        PointSet::from_points_with(
            a.ctx().clone(),
            out.into_iter().map(Point),
            Representation::Dense,
        )
    } else {
        out.sort_unstable();
        PointSet::from_points_with(
            a.ctx().clone(),
            out.into_iter().map(Point),
            Representation::Sparse,
        )
    }
}

/// `(x, |A_x|)` for every nonempty fibre, `x` ascending.
fn fibre_sizes(a: &PointSet, j: u64) -> Vec<(u64, u32)> {
    if a.is_dense() {
        let mut counts = vec![0u32; 1usize << a.dim()];
        for p in a.iter() {
            counts[(p.0 & !j) as usize] += 1;
        }
        counts
            .into_iter()
            .enumerate()
            .filter(|&(_, c)| c > 0)
            .map(|(x, c)| (x as u64, c))
            .collect()
    } else {
        let mut xs: Vec<u64> = a.iter().map(|p| p.0 & !j).collect();
        xs.sort_unstable();
        let mut out: Vec<(u64, u32)> = Vec::new();
        for x in xs {
            match out.last_mut() {
                Some((last, c)) if *last == x => *c += 1,
                _ => out.push((x, 1)),
            }
        }
        out
    }
}

/// Closed under replacing any one by a zero.
pub fn is_downset(a: &PointSet) -> bool {
    a.iter().all(|p| {
        let mut ones = p.0;
        while ones != 0 {
            let bit = ones & ones.wrapping_neg();
            ones ^= bit;
            if !a.contains(Point(p.0 ^ bit)) {
                return false;
            }
        }
        true
    })
}

/// Closed under moving a one to an empty coordinate of smaller rank.
pub fn is_shift_minimal(a: &PointSet) -> bool {
    let n = a.dim();
    a.iter().all(|p| {
        (0..n).filter(|&hi| p.coord(hi)).all(|hi| {
            (0..hi)
                .filter(|&lo| !p.coord(lo))
                .all(|lo| a.contains(Point(p.0 ^ (1 << hi) ^ (1 << lo))))
        })
    })
}

/// A shift-minimal downset.
pub fn is_smd(a: &PointSet) -> bool {
    is_downset(a) && is_shift_minimal(a)
}

/// `w(A) = Σ_{x ∈ A} 2^{ρ(x)}`, i.e. the indicator bitmap read as an integer.
pub fn weight(a: &PointSet) -> Result<BigUint> {
    const LIMIT: usize = 16;
    let n = a.dim();
    if n > LIMIT {
        return Err(Error::DimensionTooLarge {
            dim: n,
            limit: LIMIT,
            what: "compression weight",
        });
    }
    let mut digits = vec![0u32; ((1usize << n) / 32).max(1)];
    for p in a.iter() {
        digits[(p.0 >> 5) as usize] |= 1 << (p.0 & 31);
    }
    Ok(BigUint::new(digits))
}

/// One application of `C_J` during a fixpoint run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TraceStep {
    pub j: u64,
    pub changed: bool,
}

/// Record of a [`compress_to_fixpoint`] run.
#[derive(Clone, Debug)]
pub struct CompressionTrace {
    pub ctx: Arc<IndexSet>,
    pub steps: Vec<TraceStep>,
    pub passes: u64,
    /// Initial weight followed by the weight after every changing step.
    pub weights: Option<Vec<BigUint>>,
}

impl CompressionTrace {
    pub fn changes(&self) -> usize {
        self.steps.iter().filter(|s| s.changed).count()
    }

    /// Whether the recorded weights strictly decrease at every change.
    pub fn weights_descend(&self) -> Option<bool> {
        self.weights
            .as_ref()
            .map(|w| w.windows(2).all(|p| p[1] < p[0]))
    }

    /// Labels of `J` for a recorded step.
    pub fn labels(&self, step: &TraceStep) -> Vec<u32> {
        self.ctx.labels_of_mask(step.j)
    }
}

impl Serialize for CompressionTrace {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Step {
            #[serde(rename = "J")]
            j: Vec<u32>,
            changed: bool,
        }
        use serde::ser::SerializeSeq;
        let mut seq = s.serialize_seq(Some(self.steps.len()))?;
        for st in &self.steps {
            seq.serialize_element(&Step {
                j: self.labels(st),
                changed: st.changed,
            })?;
        }
        seq.end()
    }
}

/// Options for [`compress_to_fixpoint`].
#[derive(Clone, Copy, Debug, Default)]
pub struct FixpointOptions {
    /// Record `w(A)` after every change (requires `|I| <= 16`).
    pub record_weights: bool,
    /// Record every attempted `J`, not only the changing ones.
    pub record_unchanged: bool,
}

/// Repeats full passes of `C_J` over all `|J| ≤ r` until a pass changes nothing.
pub fn compress_to_fixpoint(
    a: &PointSet,
    r: usize,
    opts: FixpointOptions,
) -> Result<(PointSet, CompressionTrace)> {
    compress_to_fixpoint_with(a, r, opts, compress_mask)
}

/// As [`compress_to_fixpoint`], with the compression operator supplied by the caller.
pub fn compress_to_fixpoint_with(
    a: &PointSet,
    r: usize,
    opts: FixpointOptions,
    op: impl Fn(&PointSet, u64) -> Result<PointSet>,
) -> Result<(PointSet, CompressionTrace)> {
    let n = a.dim();
    if r < 1 || r > n.max(1) {
        return Err(Error::out_of_range("r", r, format!("1..={}", n.max(1))));
    }
    let schedule = compression_schedule(n, r);
    let cap: u64 = match u32::try_from(n + n * n) {
        Ok(e) if e < 64 => 1 << e,
        _ => u64::MAX,
    };
    let mut trace = CompressionTrace {
        ctx: a.ctx().clone(),
        steps: Vec::new(),
        passes: 0,
        weights: if opts.record_weights {
            Some(vec![weight(a)?])
        } else {
            None
        },
    };
    let mut cur = a.clone();
    loop {
        if trace.passes >= cap {
            return Err(Error::Contradiction(format!(
                "compression did not terminate within {cap} passes"
            )));
        }
        trace.passes += 1;
        let mut changed_any = false;
        for &j in &schedule {
            let changed = !is_compressed_mask(&cur, j);
            if changed {
                cur = op(&cur, j)?;
                changed_any = true;
                if let Some(w) = trace.weights.as_mut() {
                    w.push(weight(&cur)?);
                }
            }
            if changed || opts.record_unchanged {
                trace.steps.push(TraceStep { j, changed });
            }
        }
        if !changed_any {
            return Ok((cur, trace));
        }
    }
}
