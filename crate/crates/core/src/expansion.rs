//! The counters-moving-left defect process, the tail function `q(r)`, and
//! exact checkers for the three sumset expansion bounds.
//!
//! Monte Carlo routines draw every trial from its own ChaCha8 stream: the
//! generator is seeded with `seed` and switched to stream number `trial`
//! (the trial index). Results are merged by summation, so they do not depend
//! on how trials are split across threads.

use num_bigint::BigUint;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::bits::low_mask;
use crate::group::{hamming_ball, sum_all, sumset, IndexSet, Point, PointSet};

/// `2 + √5`.
pub fn golden_cube() -> f64 {
    2.0 + 5f64.sqrt()
}

/// Outcome of the redistribution game on three points.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct DefectResult {
    /// `z = Σ_{i ∈ S} e_i` for the set `S` of covered positions.
    pub witness: Point,
    /// `n − |S|`.
    pub defect: u32,
}

impl DefectResult {
    pub fn covered_labels(&self, ctx: &IndexSet) -> Vec<u32> {
        ctx.labels_of_mask(self.witness.0)
    }
}

/// Walks positions from the largest rank down, picking up the counters
/// `x_i + x'_i + x''_i` and leaving one behind whenever the hand is nonempty.
pub fn defect(n: usize, x: Point, xp: Point, xpp: Point) -> DefectResult {
    let mut hand = 0u32;
    let mut z = 0u64;
    for i in (0..n).rev() {
        hand += (x.0 >> i & 1) as u32 + (xp.0 >> i & 1) as u32 + (xpp.0 >> i & 1) as u32;
        if hand >= 1 {
            z |= 1 << i;
            hand -= 1;
        }
    }
    DefectResult {
        witness: Point(z),
        defect: n as u32 - z.count_ones(),
    }
}

/// `q(r) = (2 + √5)^{-r}`.
pub fn q_exact(r: i64) -> Result<f64> {
    if r < 0 {
        return Err(Error::out_of_range("r", r, "r >= 0"));
    }
    Ok(golden_cube().powi(-(r as i32)))
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct RecurrenceResidual {
    /// `|q(r+1) − (q(r+3) + 3q(r+2) + 3q(r+1) + q(r))/8|`.
    pub recurrence: f64,
    /// `|p(√5 − 2)|` for the characteristic polynomial `p(x) = x³ + 3x² − 5x + 1`.
    pub characteristic_root: f64,
    /// `max |p(x) − (x − 1)(x² + 4x − 1)|` over a small grid of `x`.
    pub factorization: f64,
}

pub fn q_recurrence_residual(r: u32) -> RecurrenceResidual {
    let q = |k: u32| golden_cube().powi(-(k as i32));
    let rhs = (q(r + 3) + 3.0 * q(r + 2) + 3.0 * q(r + 1) + q(r)) / 8.0;
    let p = |x: f64| x * x * x + 3.0 * x * x - 5.0 * x + 1.0;
    let root = 5f64.sqrt() - 2.0;
    let factorization = (-4..=4)
        .map(|k| {
            let x = k as f64 * 0.75;
            (p(x) - (x - 1.0) * (x * x + 4.0 * x - 1.0)).abs()
        })
        .fold(0.0, f64::max);
    RecurrenceResidual {
        recurrence: (q(r + 1) - rhs).abs(),
        characteristic_root: p(root).abs(),
        factorization,
    }
}

/// Truncation of the infinite game. With `s` counters in hand the chance of ever
/// running dry again is at most `(√5 − 2)^s`, so the defaults bias an estimate
/// by less than `2^-80`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct QSimConfig {
    /// A trial is abandoned as a failure once this many counters are in hand.
    pub surplus_cap: u32,
    /// A trial is abandoned as a failure after this many positions.
    pub max_positions: u32,
}

impl Default for QSimConfig {
    fn default() -> Self {
        QSimConfig {
            surplus_cap: 64,
            max_positions: 10_000,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct QEstimate {
    pub r: u32,
    pub trials: u64,
    pub successes: u64,
    pub estimate: f64,
    pub std_error: f64,
    pub seed: u64,
}

impl QEstimate {
    fn from_counts(r: u32, trials: u64, successes: u64, seed: u64) -> Self {
        let estimate = successes as f64 / trials as f64;
        QEstimate {
            r,
            trials,
            successes,
            estimate,
            std_error: (estimate * (1.0 - estimate) / trials as f64).sqrt(),
            seed,
        }
    }
}

/// The generator for one trial: seeded by `seed`, stream `trial`.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Plays one game on positions `0, −1, −2, …` with three fair coins per position.
/// Returns whether at least `r` positions are left uncovered.
fn play(r: u32, cfg: QSimConfig, rng: &mut impl RngCore) -> bool {
    let mut hand = 0u32;
    let mut uncovered = 0u32;
    let mut bits = 0u64;
    let mut avail = 0u32;
    for _ in 0..cfg.max_positions {
        if avail < 3 {
            bits = rng.next_u64();
            avail = 63;
        }
        hand += (bits & 7).count_ones();
        bits >>= 3;
        avail -= 3;
        if hand >= 1 {
            hand -= 1;
        } else {
            uncovered += 1;
            if uncovered >= r {
                return true;
            }
        }
        if hand >= cfg.surplus_cap {
            return false;
        }
    }
    false
}

/// Monte Carlo estimate of `q(r) = P(D ≥ r)`.
pub fn simulate_q(r: u32, trials: u64, seed: u64) -> Result<QEstimate> {
    simulate_q_with(r, trials, seed, QSimConfig::default())
}

pub fn simulate_q_with(r: u32, trials: u64, seed: u64, cfg: QSimConfig) -> Result<QEstimate> {
    if r < 1 {
        return Err(Error::out_of_range("r", r, "r >= 1"));
    }
    if trials < 1 {
        return Err(Error::out_of_range("trials", trials, "trials >= 1"));
    }
    let successes = (0..trials)
        .into_par_iter()
        .filter(|&t| play(r, cfg, &mut trial_rng(seed, t)))
        .count() as u64;
    Ok(QEstimate::from_counts(r, trials, successes, seed))
}

#[derive(Clone, Debug, Serialize)]
pub struct TailRow {
    pub r: u32,
    pub count: u64,
    pub empirical: f64,
    pub std_error: f64,
    pub q_exact: f64,
}

impl TailRow {
    /// `empirical ≤ q(r) + k·SE`.
    pub fn within(&self, k: f64) -> bool {
        self.empirical <= self.q_exact + k * self.std_error
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DefectTail {
    pub n: usize,
    pub trials: u64,
    pub seed: u64,
    pub rows: Vec<TailRow>,
}

/// Tabulates `P(d(x, x', x'') ≥ r)` for uniform triples in F_2^n against `q(r)`.
pub fn empirical_defect_tail(n: usize, trials: u64, seed: u64, rmax: u32) -> Result<DefectTail> {
    if n > 64 {
        return Err(Error::DimensionTooLarge {
            dim: n,
            limit: 64,
            what: "defect sampling",
        });
    }
    if trials < 1 {
        return Err(Error::out_of_range("trials", trials, "trials >= 1"));
    }
    let mask = low_mask(n);
    let hist = (0..trials)
        .into_par_iter()
        .fold(
            || vec![0u64; n + 1],
            |mut h, t| {
                let mut rng = trial_rng(seed, t);
                let x = Point(rng.next_u64() & mask);
                let xp = Point(rng.next_u64() & mask);
                let xpp = Point(rng.next_u64() & mask);
                h[defect(n, x, xp, xpp).defect as usize] += 1;
                h
            },
        )
        .reduce(
            || vec![0u64; n + 1],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        );
    let rows = (0..=rmax)
        .map(|r| {
            let count: u64 = hist.iter().skip(r as usize).sum();
            let p = count as f64 / trials as f64;
            TailRow {
                r,
                count,
                empirical: p,
                std_error: (p * (1.0 - p) / trials as f64).sqrt(),
                q_exact: golden_cube().powi(-(r as i32)),
            }
        })
        .collect();
    Ok(DefectTail {
        n,
        trials,
        seed,
        rows,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct HammingExpandReport {
    pub r: u32,
    pub a_size: u64,
    pub b_size: u64,
    pub sumset_size: u64,
    /// `9^{-r}|A||B|`.
    pub bound: f64,
    pub holds: bool,
    pub slack: f64,
}

/// Checks `|A + B| ≥ 9^{-r}|A||B|` exactly for `A, B ⊆ H_r(I)`.
pub fn check_hamming_expand(a: &PointSet, b: &PointSet, r: u32) -> Result<HammingExpandReport> {
    a.check_same_ctx(b)?;
    for (name, s) in [("A", a), ("B", b)] {
        if let Some(m) = s.max_norm() {
            if m > r {
                return Err(Error::Precondition(format!(
                    "{name} has a point of norm {m} outside H_{r}"
                )));
            }
        }
    }
    let s = sumset(a, b)?;
    let lhs = BigUint::from(s.len()) * BigUint::from(9u32).pow(r);
    let rhs = BigUint::from(a.len()) * BigUint::from(b.len());
    let bound = a.len() as f64 * b.len() as f64 / 9f64.powi(r as i32);
    Ok(HammingExpandReport {
        r,
        a_size: a.len() as u64,
        b_size: b.len() as u64,
        sumset_size: s.len() as u64,
        bound,
        holds: lhs >= rhs,
        slack: s.len() as f64 - bound,
    })
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct BogWitness {
    pub witness: Point,
    pub norm: u32,
    /// `|I| − r`.
    pub required: i64,
}

/// Whether `|A||A'||A''| ≥ (2 + √5)^{-r} 2^{3|I|}`.
pub fn bog_condition(a: &PointSet, ap: &PointSet, app: &PointSet, r: u32) -> bool {
    let n = a.dim() as f64;
    let lhs = [a, ap, app]
        .iter()
        .map(|s| (s.len() as f64).log2())
        .sum::<f64>()
        + r as f64 * golden_cube().log2();
    lhs >= 3.0 * n
}

/// Finds `z ∈ A + A' + A''` with `‖z‖ ≥ |I| − r` under the size condition.
pub fn check_downset_bog(
    a: &PointSet,
    ap: &PointSet,
    app: &PointSet,
    r: u32,
) -> Result<BogWitness> {
    a.check_same_ctx(ap)?;
    a.check_same_ctx(app)?;
    if !bog_condition(a, ap, app, r) {
        return Err(Error::Precondition(format!(
            "|A||A'||A''| = {}·{}·{} is below (2+√5)^-{r}·2^{}",
            a.len(),
            ap.len(),
            app.len(),
            3 * a.dim()
        )));
    }
    let total = sum_all(&[a, ap, app])?;
    let required = a.dim() as i64 - r as i64;
    let best = total
        .iter()
        .max_by_key(|p| (p.norm(), std::cmp::Reverse(p.0)))
        .ok_or_else(|| {
            Error::Contradiction("empty triple sumset under the size condition".into())
        })?;
    if (best.norm() as i64) < required {
        return Err(Error::Contradiction(format!(
            "largest norm in A+A'+A'' is {}, below |I|-r = {required}",
            best.norm()
        )));
    }
    Ok(BogWitness {
        witness: best,
        norm: best.norm(),
        required,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ExpansionReport {
    pub r: u32,
    pub lhs: u64,
    /// `min(½(2+√5)^{r/3}(|A||A'||A''|)^{1/3}, 2^{|I|})`.
    pub rhs: f64,
    pub holds: bool,
}

/// Checks `|A + A' + A'' + H_r(I)| ≥ min(½(2+√5)^{r/3}(|A||A'||A''|)^{1/3}, 2^{|I|})`.
pub fn check_expansion(
    a: &PointSet,
    ap: &PointSet,
    app: &PointSet,
    r: u32,
) -> Result<ExpansionReport> {
    a.check_same_ctx(ap)?;
    a.check_same_ctx(app)?;
    let n = a.dim();
    let ball = hamming_ball(a.ctx().clone(), r as usize)?;
    let total = sum_all(&[a, ap, app, &ball])?;
    let cube = (a.len() as f64 * ap.len() as f64 * app.len() as f64).cbrt();
    let rhs = (0.5 * golden_cube().powf(r as f64 / 3.0) * cube).min(2f64.powi(n as i32));
    let lhs = total.len() as u64;
    Ok(ExpansionReport {
        r,
        lhs,
        rhs,
        // rhs is irrational unless it equals 2^n; allow for rounding in the last place
        holds: lhs as f64 >= rhs * (1.0 - 1e-12),
    })
}
