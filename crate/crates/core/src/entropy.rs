//! Binary entropy and the exponent ratio attained by Hamming-ball witnesses.

use num_traits::ToPrimitive;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::ball_size;

/// Upper end of the admissible range `(0, 1/10]` for `α`.
pub const ALPHA_MAX: f64 = 0.1;

/// `h(α) = −α log2 α − (1 − α) log2(1 − α)`, with `h(0) = h(1) = 0`.
pub fn entropy(alpha: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::out_of_range("alpha", alpha, "[0, 1]"));
    }
    Ok(h(alpha))
}

fn h(a: f64) -> f64 {
    let term = |p: f64| if p <= 0.0 { 0.0 } else { -p * p.log2() };
    term(a) + term(1.0 - a)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AlphaProfile {
    pub alpha: f64,
    /// `h(2α) − h(α)`: growth rate of `log2 σ[H_{αn}(n)]`.
    pub sigma_exponent: f64,
    /// `(1 − h(α)) h(α / (1 − h(α)))`: growth rate of `log2 τ[H_{αn}(n)]`.
    pub tau_exponent: f64,
    pub ratio: f64,
}

fn ratio_at(a: f64) -> f64 {
    let ha = h(a);
    (1.0 - ha) * h(a / (1.0 - ha)) / (h(2.0 * a) - ha)
}

pub fn profile(alpha: f64) -> Result<AlphaProfile> {
    if !(alpha > 0.0 && alpha <= ALPHA_MAX) {
        return Err(Error::out_of_range("alpha", alpha, "(0, 1/10]"));
    }
    let ha = h(alpha);
    let sigma_exponent = h(2.0 * alpha) - ha;
    let tau_exponent = (1.0 - ha) * h(alpha / (1.0 - ha));
    Ok(AlphaProfile {
        alpha,
        sigma_exponent,
        tau_exponent,
        ratio: tau_exponent / sigma_exponent,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Optimum {
    pub alpha: f64,
    pub ratio: f64,
}

/// Number of points in the coarse grid pass of [`optimize_ratio`].
pub const GRID_POINTS: usize = 10_000;

/// Maximizes the exponent ratio over `(0, 1/10]`: a coarse grid locates the best
/// cell, then golden-section search narrows the bracket around it to width `tol`.
pub fn optimize_ratio(tol: f64) -> Result<Optimum> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::out_of_range("tol", tol, "tol > 0"));
    }
    let step = ALPHA_MAX / GRID_POINTS as f64;
    let best = (1..=GRID_POINTS)
        .map(|i| i as f64 * step)
        .map(|a| (a, ratio_at(a)))
        .fold(
            (0.0, f64::NEG_INFINITY),
            |b, c| if c.1 > b.1 { c } else { b },
        );
    let mut lo = (best.0 - step).max(step * 1e-3);
    let mut hi = (best.0 + step).min(ALPHA_MAX);
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let (mut f1, mut f2) = (ratio_at(x1), ratio_at(x2));
    while hi - lo > tol {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = ratio_at(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = ratio_at(x1);
        }
    }
    let alpha = (lo + hi) / 2.0;
    let candidate = Optimum {
        alpha,
        ratio: ratio_at(alpha),
    };
    // the grid point itself wins if the bracket search somehow did worse
    Ok(if candidate.ratio >= best.1 {
        candidate
    } else {
        Optimum {
            alpha: best.0,
            ratio: best.1,
        }
    })
}

/// The ratio at `α = 10^{-k}` for `k = 1..=kmax`, showing the behavior as `α → 0`.
pub fn small_alpha_limit(kmax: u32) -> Vec<AlphaProfile> {
    (1..=kmax)
        .map(|k| profile(10f64.powi(-(k as i32))).expect("in range"))
        .collect()
}

/// Exact counts for the witness `A = H_{⌊αn⌋}(n)` against the asymptotic exponents.
#[derive(Clone, Debug, Serialize)]
pub struct WitnessRow {
    pub n: u64,
    pub alpha: f64,
    pub radius: u64,
    /// `⌊αn⌋ = 0`: the witness is `{0}` and the log rates carry no information.
    pub degenerate: bool,
    pub set_size: u128,
    /// `|A + A| = |H_{min(2r, n)}(n)|`.
    pub sumset_size: u128,
    /// `(1/n) log2 σ[A]`.
    pub sigma_rate: f64,
    /// `⌊log2 |A|⌋`.
    pub m: u64,
    /// `|H_r(n − m)|`.
    pub tau: u128,
    /// `(1/n) log2 τ`.
    pub tau_rate: f64,
    pub sigma_exponent: f64,
    pub tau_exponent: f64,
    pub sigma_gap: f64,
    pub tau_gap: f64,
}

pub fn hamming_witness_row(n: u64, alpha: f64) -> Result<WitnessRow> {
    if n == 0 || n > 64 {
        return Err(Error::out_of_range("n", n, "1..=64"));
    }
    let p = profile(alpha)?;
    let radius = (alpha * n as f64).floor() as u64;
    let size = ball_size(n, radius);
    let m = size.bits() - 1;
    let big = |b: num_bigint::BigUint| b.to_u128().expect("at most 2^64");
    let set_size = big(size);
    let sumset_size = big(ball_size(n, (2 * radius).min(n)));
    let tau = big(ball_size(n - m, radius));
    let nf = n as f64;
    let sigma_rate = (sumset_size as f64 / set_size as f64).log2() / nf;
    let tau_rate = (tau as f64).log2() / nf;
    Ok(WitnessRow {
        n,
        alpha,
        radius,
        degenerate: radius == 0,
        set_size,
        sumset_size,
        sigma_rate,
        m,
        tau,
        tau_rate,
        sigma_exponent: p.sigma_exponent,
        tau_exponent: p.tau_exponent,
        sigma_gap: (sigma_rate - p.sigma_exponent).abs(),
        tau_gap: (tau_rate - p.tau_exponent).abs(),
    })
}

pub fn hamming_witness_table(
    ns: impl IntoIterator<Item = u64>,
    alpha: f64,
) -> Result<Vec<WitnessRow>> {
    ns.into_iter()
        .map(|n| hamming_witness_row(n, alpha))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn entropy_values() {
        assert_eq!(entropy(0.5).unwrap(), 1.0);
        assert_eq!(entropy(0.0).unwrap(), 0.0);
        assert_eq!(entropy(1.0).unwrap(), 0.0);
        assert!((entropy(0.25).unwrap() - 0.811_278_124_459_132_8).abs() < 1e-15);
        assert!(entropy(-0.1).is_err() && entropy(1.5).is_err() && entropy(f64::NAN).is_err());
    }

    #[test]
    fn entropy_symmetric_and_concave() {
        for i in 0..=1000 {
            let a = i as f64 / 1000.0;
            assert!((h(a) - h(1.0 - a)).abs() <= 1e-12);
            if i > 0 && i < 1000 {
                let mid = h(a);
                let chord = (h(a - 1e-3) + h(a + 1e-3)) / 2.0;
                assert!(mid >= chord);
            }
        }
    }

    #[test]
    fn profile_examples() {
        let p = profile(0.05).unwrap();
        assert!(p.ratio < 1.46601);
        assert!(p.sigma_exponent > 0.0 && p.tau_exponent > 0.0);
        let p = profile(0.0939288).unwrap();
        assert!((p.ratio - 1.46601).abs() <= 1e-4);
        assert!(profile(0.0).is_err() && profile(0.11).is_err());
    }

    #[test]
    fn optimum() {
        let o = optimize_ratio(1e-8).unwrap();
        // independent reference: scipy bounded scalar minimization of the same objective
        assert!((o.alpha - 0.093_928_829_368_089_06).abs() < 1e-6, "{o:?}");
        assert!((o.ratio - 1.466_012_371_164_196_6).abs() < 1e-9);
        let finer = optimize_ratio(1e-10).unwrap();
        assert!((finer.alpha - o.alpha).abs() < 1e-8);
        for i in 1..=10_000 {
            assert!(ratio_at(i as f64 * 1e-5) <= o.ratio + 1e-12);
        }
        assert!(optimize_ratio(0.0).is_err());
    }

    #[test]
    fn small_alpha_limit_is_finite() {
        let rows = small_alpha_limit(8);
        assert!(rows.iter().all(|p| p.ratio.is_finite() && p.ratio > 1.0));
        assert!((rows[7].ratio - rows[6].ratio).abs() < 0.02);
    }

    #[test]
    fn witness_rows() {
        let r = hamming_witness_row(10, 0.0939288).unwrap();
        assert!(r.degenerate);
        assert_eq!((r.set_size, r.tau), (1, 1));
        let r = hamming_witness_row(32, 0.0939288).unwrap();
        assert_eq!(r.radius, 3);
        assert_eq!(r.set_size, 1 + 32 + 496 + 4960);
        assert_eq!(r.m, 12);
        assert_eq!(r.tau, 1 + 20 + 190 + 1140);
        assert_eq!(r.sumset_size, ball_size(32, 6).to_u128().unwrap());
        assert!(hamming_witness_row(65, 0.05).is_err());
    }
}
