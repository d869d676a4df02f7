//! Self-check suites run by `f2add verify`.
//!
//! Every suite is deterministic for a given seed. A suite reports how many
//! cases it ran, how many violated the property under test, and the smallest
//! slack seen where a property has a numeric margin.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use f2add_core::entropy::{entropy, hamming_witness_row, optimize_ratio};
use f2add_core::expansion::{
    bog_condition, check_downset_bog, check_expansion, check_hamming_expand, empirical_defect_tail,
    q_recurrence_residual, simulate_q,
};
use f2add_core::group::{
    ball_size, doubling, for_each_subspace, hamming_ball, join_set, sumset, IndexSet, PointSet,
};
use f2add_core::lex::{
    compress_mask, compress_to_fixpoint_with, compression_schedule, hs, initial_segment,
    is_compressed_mask, is_downset, is_initial_segment, is_smd, FixpointOptions,
};
use f2add_core::sample::{random_downset, random_nonempty_set, random_subset};
use f2add_core::scan::{
    downset_masks, enumerate_downsets, f_scan, kneser_check, ruzsa_cover, small_k_formula,
    smd_masks, tau_hamming_ball, tau_smd,
};
use f2add_core::{Point, Result};
use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

/// The compression operator used by the suites, replaceable for fault injection.
pub type CompressFn = Arc<dyn Fn(&PointSet, u64) -> Result<PointSet> + Send + Sync>;

#[derive(Clone)]
pub struct Hooks {
    pub compress: CompressFn,
}

impl Default for Hooks {
    fn default() -> Self {
        Hooks {
            compress: Arc::new(compress_mask),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Compression,
    Lattice,
    Hs,
    Expansion,
    Qsim,
    Scan,
    Smallk,
    Entropy,
    All,
}

impl Suite {
    pub const EACH: [Suite; 8] = [
        Suite::Compression,
        Suite::Lattice,
        Suite::Hs,
        Suite::Expansion,
        Suite::Qsim,
        Suite::Scan,
        Suite::Smallk,
        Suite::Entropy,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Compression => "compression",
            Suite::Lattice => "lattice",
            Suite::Hs => "hs",
            Suite::Expansion => "expansion",
            Suite::Qsim => "qsim",
            Suite::Scan => "scan",
            Suite::Smallk => "smallk",
            Suite::Entropy => "entropy",
            Suite::All => "all",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Suite::EACH
            .iter()
            .chain([&Suite::All])
            .find(|x| x.name() == s)
            .copied()
            .ok_or_else(|| format!("unknown suite {s:?}"))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub suite: &'static str,
    pub cases: u64,
    pub violations: u64,
    pub worst_slack: Option<f64>,
    /// The first few violations, for diagnosis.
    pub failures: Vec<String>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

const MAX_FAILURES: usize = 10;

struct Tally {
    report: SuiteReport,
}

impl Tally {
    fn new(suite: Suite) -> Self {
        Tally {
            report: SuiteReport {
                suite: suite.name(),
                cases: 0,
                violations: 0,
                worst_slack: None,
                failures: Vec::new(),
            },
        }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.report.cases += 1;
        if !ok {
            self.report.violations += 1;
            if self.report.failures.len() < MAX_FAILURES {
                self.report.failures.push(what());
            }
        }
    }

    fn slack(&mut self, s: f64) {
        let w = self.report.worst_slack.get_or_insert(s);
        *w = w.min(s);
    }

    /// Records an error from the code under test as a violation.
    fn guard<T>(&mut self, r: Result<T>, what: &str) -> Option<T> {
        match r {
            Ok(v) => Some(v),
            Err(e) => {
                self.check(false, || format!("{what}: {e}"));
                None
            }
        }
    }
}

fn ctx(n: usize) -> Arc<IndexSet> {
    Arc::new(IndexSet::standard(n).expect("n <= 64"))
}

fn all_j_up_to(n: usize, k: usize) -> Vec<u64> {
    compression_schedule(n, k.min(n))
}

pub fn run_suite(suite: Suite, seed: u64, hooks: &Hooks) -> Vec<SuiteReport> {
    match suite {
        Suite::All => Suite::EACH
            .iter()
            .flat_map(|&s| run_suite(s, seed, hooks))
            .collect(),
        Suite::Compression => vec![compression(seed, hooks)],
        Suite::Lattice => vec![lattice(seed)],
        Suite::Hs => vec![hs_suite()],
        Suite::Expansion => vec![expansion(seed)],
        Suite::Qsim => vec![qsim(seed)],
        Suite::Scan => vec![scan()],
        Suite::Smallk => vec![smallk()],
        Suite::Entropy => vec![entropy_suite()],
    }
}

fn compression(seed: u64, hooks: &Hooks) -> SuiteReport {
    let mut t = Tally::new(Suite::Compression);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let compress = &hooks.compress;
    for case in 0..100 {
        let n = rng.random_range(1..=8);
        let c = ctx(n);
        let (Some(a), Some(b)) = (
            t.guard(random_nonempty_set(&c, &mut rng), "sampling"),
            t.guard(random_nonempty_set(&c, &mut rng), "sampling"),
        ) else {
            continue;
        };
        let union = a.union(&b).expect("same context");
        let ab = sumset(&a, &b).expect("same context");
        for j in all_j_up_to(n, 3) {
            let (Some(ca), Some(cb), Some(cu), Some(cab)) = (
                t.guard(compress(&a, j), "compress"),
                t.guard(compress(&b, j), "compress"),
                t.guard(compress(&union, j), "compress"),
                t.guard(compress(&ab, j), "compress"),
            ) else {
                continue;
            };
            t.check(ca.len() == a.len(), || {
                format!("case {case}: |C_J(A)| != |A| for J={j:#b}")
            });
            t.check(is_compressed_mask(&ca, j), || {
                format!("case {case}: C_J(A) not J-compressed")
            });
            if let Some(cca) = t.guard(compress(&ca, j), "compress") {
                t.check(cca == ca, || {
                    format!("case {case}: C_J not idempotent for J={j:#b}")
                });
            }
            t.check(ca.is_subset(&cu).unwrap_or(false), || {
                format!("case {case}: monotonicity fails for J={j:#b}")
            });
            let lhs = sumset(&ca, &cb).expect("same context");
            t.check(lhs.is_subset(&cab).unwrap_or(false), || {
                format!("case {case}: C_J(A)+C_J(B) not inside C_J(A+B) for J={j:#b}")
            });
            if let (Ok(d0), Ok(d1)) = (doubling(&a), doubling(&ca)) {
                t.check(d1 <= d0, || {
                    format!("case {case}: doubling rose from {d0} to {d1}")
                });
            }
        }
        // fixpoints through the same operator
        let hook = |s: &PointSet, j: u64| compress(s, j);
        for (r, pred, name) in [
            (1, is_downset as fn(&PointSet) -> bool, "downset"),
            (2.min(n), is_smd, "SMD"),
            (n, is_initial_segment, "initial segment"),
        ] {
            if r == 2 && n < 2 {
                continue;
            }
            if let Some((fx, _)) = t.guard(
                compress_to_fixpoint_with(&a, r, FixpointOptions::default(), hook),
                "fixpoint",
            ) {
                let ok = fx.len() == a.len() && pred(&fx);
                t.check(ok, || {
                    format!("case {case}: order-{r} fixpoint is not a {name}")
                });
            }
        }
    }
    t.report
}

fn lattice(seed: u64) -> SuiteReport {
    let mut t = Tally::new(Suite::Lattice);
    let downs = enumerate_downsets(3).expect("n = 3");
    for a in &downs {
        for b in &downs {
            let s = sumset(a, b).expect("same context");
            t.check(s == join_set(a, b).expect("same context"), || {
                "A+B != A∨B at n=3".into()
            });
            t.check(is_downset(&s), || "sum of downsets is not a downset".into());
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..200 {
        let c = ctx(rng.random_range(1..=10));
        let a = random_downset(&c, &mut rng).expect("valid");
        let b = random_downset(&c, &mut rng).expect("valid");
        let s = sumset(&a, &b).expect("same context");
        t.check(s == join_set(&a, &b).expect("same context"), || {
            format!("A+B != A∨B at n={}", c.dim())
        });
    }
    t.report
}

fn hs_suite() -> SuiteReport {
    let mut t = Tally::new(Suite::Hs);
    let c = ctx(8);
    let segs: Vec<PointSet> = (0..=128)
        .map(|m| initial_segment(c.clone(), m).expect("fits"))
        .collect();
    for (r, a) in segs.iter().enumerate() {
        for (s, b) in segs.iter().enumerate() {
            let got = hs(r as u64, s as u64);
            let want = sumset(a, b).expect("same context").len() as u64;
            t.check(got == want, || {
                format!("hs({r},{s}) = {got}, segments give {want}")
            });
        }
    }
    for k in 0..=6u32 {
        let p = 1u64 << k;
        for r in 0..p {
            for s in 0..p {
                if s >= 1 {
                    t.check(hs(p + r, s) == hs(r, s) + p, || {
                        format!("shift relation k={k} r={r} s={s}")
                    });
                }
                if r + s >= 1 {
                    t.check(hs(p + r, p + s) == 2 * p, || {
                        format!("double relation k={k} r={r} s={s}")
                    });
                }
            }
        }
    }
    t.report
}

fn expansion(seed: u64) -> SuiteReport {
    let mut t = Tally::new(Suite::Expansion);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let h1 = hamming_ball(ctx(4), 1).expect("r <= n");
    let pts = h1.points();
    for ma in 1u32..1 << pts.len() {
        for mb in (1u32..1 << pts.len()).step_by(3) {
            let pick = |m: u32| {
                PointSet::from_points(
                    ctx(4),
                    (0..pts.len()).filter(|i| m >> i & 1 == 1).map(|i| pts[i]),
                )
                .expect("valid")
            };
            if let Some(rep) = t.guard(check_hamming_expand(&pick(ma), &pick(mb), 1), "hamming") {
                t.check(rep.holds, || {
                    format!("|A+B| < |A||B|/9 for masks {ma:#x},{mb:#x}")
                });
                t.slack(rep.slack);
            }
        }
    }
    for (n, r) in [(8usize, 2u32), (9, 3)] {
        let ball = hamming_ball(ctx(n), r as usize).expect("r <= n");
        for _ in 0..50 {
            let a = random_subset(&ball, rng.random_range(0.05..0.8), &mut rng).expect("valid");
            let b = random_subset(&ball, rng.random_range(0.05..0.8), &mut rng).expect("valid");
            if let Some(rep) = t.guard(check_hamming_expand(&a, &b, r), "hamming") {
                t.check(rep.holds, || format!("hamming bound fails at n={n} r={r}"));
                t.slack(rep.slack);
            }
        }
    }
    for _ in 0..200 {
        let n = rng.random_range(1..=10);
        let r = rng.random_range(0..=4.min(n)) as u32;
        let c = ctx(n);
        let d: Vec<PointSet> = (0..3)
            .map(|_| random_downset(&c, &mut rng).expect("valid"))
            .collect();
        if bog_condition(&d[0], &d[1], &d[2], r) {
            let found = check_downset_bog(&d[0], &d[1], &d[2], r);
            t.check(found.is_ok(), || {
                format!("no norm >= n-r witness at n={n} r={r}")
            });
        }
        let s: Vec<PointSet> = (0..3)
            .map(|_| random_nonempty_set(&c, &mut rng).expect("valid"))
            .collect();
        if let Some(rep) = t.guard(check_expansion(&s[0], &s[1], &s[2], r), "expansion") {
            t.check(rep.holds, || {
                format!("expansion bound fails at n={n} r={r}")
            });
            t.slack(rep.lhs as f64 - rep.rhs);
        }
    }
    t.report
}

fn qsim(seed: u64) -> SuiteReport {
    let mut t = Tally::new(Suite::Qsim);
    for r in 0..=10 {
        let res = q_recurrence_residual(r);
        t.check(
            res.recurrence <= 1e-12 && res.characteristic_root <= 1e-12,
            || format!("recurrence residual at r={r}: {res:?}"),
        );
    }
    for r in 1..=2u32 {
        if let Some(est) = t.guard(simulate_q(r, 100_000, seed), "simulate") {
            let exact = f2add_core::expansion::golden_cube().powi(-(r as i32));
            let z = (est.estimate - exact).abs() / est.std_error;
            t.check(z <= 3.0, || {
                format!("q({r}) estimate {} is {z:.2} SE from {exact}", est.estimate)
            });
            t.slack(3.0 - z);
        }
    }
    if let Some(tail) = t.guard(empirical_defect_tail(30, 100_000, seed, 3), "tail") {
        for row in &tail.rows {
            t.check(row.within(3.0), || {
                format!("P(d >= {}) = {} exceeds q + 3 SE", row.r, row.empirical)
            });
        }
    }
    t.report
}

fn scan() -> SuiteReport {
    let mut t = Tally::new(Suite::Scan);
    let want = [2usize, 3, 6, 20, 168, 7581];
    for (n, &w) in want.iter().enumerate() {
        let got = downset_masks(n).map(|v| v.len()).unwrap_or(0);
        t.check(got == w, || {
            format!("{got} downsets of F_2^{n}, expected {w}")
        });
    }
    for n in 0..=5 {
        let c = ctx(n);
        let mut filtered: Vec<u64> = downset_masks(n)
            .expect("n <= 6")
            .into_iter()
            .filter(|&m| is_smd(&f2add_core::scan::mask_to_set(&c, m)))
            .collect();
        let mut direct = smd_masks(n).expect("n <= 6");
        filtered.sort_unstable();
        direct.sort_unstable();
        t.check(filtered == direct, || {
            format!("SMD generators disagree at n={n}")
        });
    }
    let mut subspaces = 0u64;
    for_each_subspace(5, 5, |_| subspaces += 1);
    t.check(subspaces == 374, || {
        format!("{subspaces} subspaces of F_2^5")
    });
    for n in 1..=16u64 {
        for s in 0..=n.min(4) {
            let ball = hamming_ball(ctx(n as usize), s as usize).expect("s <= n");
            let ok = tau_smd(&ball)
                .map(|v| num_bigint_eq(v, tau_hamming_ball(n, s)))
                .unwrap_or(false);
            t.check(ok, || format!("tau of H_{s}({n}) disagrees with binomials"));
        }
    }
    for n in 1..=5 {
        for a in f2add_core::scan::enumerate_smds(n)
            .expect("n <= 6")
            .iter()
            .filter(|a| !a.is_empty())
        {
            let m = usize::BITS as usize - 1 - a.len().leading_zeros() as usize;
            let b = a.restrict_to_low(m);
            t.check(ruzsa_cover(a, &b).is_ok(), || {
                format!("Ruzsa cover fails for an SMD at n={n}")
            });
            if let Some(k) = t.guard(kneser_check(a), "kneser") {
                t.check(k.holds, || "Kneser bound fails".into());
            }
        }
    }
    t.report
}

fn num_bigint_eq(v: u64, b: num_bigint::BigUint) -> bool {
    b == num_bigint::BigUint::from(v)
}

fn smallk() -> SuiteReport {
    let mut t = Tally::new(Suite::Smallk);
    let seven_fourths = Ratio::new(7u64, 4);
    let nine_fifths = Ratio::new(9u64, 5);
    for n in 1..=5 {
        let Some(scan) = t.guard(f_scan(n), "scan") else {
            continue;
        };
        for rec in &scan.records {
            let sigma = rec.sigma.value();
            let hull = Ratio::from_integer(rec.hull_size());
            let size = Ratio::from_integer(rec.size);
            let g = rec.g_exact.unwrap_or(u64::MAX);
            if sigma < seven_fourths {
                t.check(hull <= sigma * size && g <= 2, || {
                    format!("small-K bound fails: {rec:?}")
                });
            } else if sigma < nine_fifths {
                let ok = hull <= sigma * size * Ratio::new(8, 7) && g <= 3;
                t.check(ok, || format!("8/7 bound fails: {rec:?}"));
            }
        }
        t.check(
            scan.envelope
                .first()
                .is_some_and(|e| e.hull_ratio == Ratio::from_integer(1)),
            || "envelope at K=1 is not 1".into(),
        );
    }
    for (k, want) in [
        (Ratio::new(3, 2), Ratio::new(3, 2)),
        (seven_fourths, Ratio::from_integer(2)),
        (Ratio::from_integer(1), Ratio::from_integer(1)),
    ] {
        t.check(small_k_formula(k).ok() == Some(want), || {
            format!("small_k_formula({k})")
        });
    }
    t.report
}

fn entropy_suite() -> SuiteReport {
    let mut t = Tally::new(Suite::Entropy);
    for i in 0..=1000 {
        let a = i as f64 / 1000.0;
        let d = (entropy(a).unwrap_or(f64::NAN) - entropy(1.0 - a).unwrap_or(f64::NAN)).abs();
        t.check(d <= 1e-12, || format!("h not symmetric at {a}"));
    }
    if let Some(o) = t.guard(optimize_ratio(1e-8), "optimize") {
        t.check((o.alpha - 0.0939288).abs() <= 1e-5, || {
            format!("alpha* = {}", o.alpha)
        });
        t.check((o.ratio - 1.46601).abs() <= 1e-4, || {
            format!("ratio* = {}", o.ratio)
        });
        t.slack(1e-4 - (o.ratio - 1.46601).abs());
    }
    for n in 1..=14usize {
        for r in 0..=n / 2 + 1 {
            let ball = hamming_ball(ctx(n), r.min(n)).expect("r <= n");
            let s = sumset(&ball, &ball).expect("same context");
            let want = ball_size(n as u64, (2 * r).min(n) as u64);
            t.check(num_bigint::BigUint::from(s.len()) == want, || {
                format!("H_{r}({n}) + H_{r}({n}) has size {}", s.len())
            });
        }
    }
    for n in [24u64, 32, 48, 64] {
        let ok = hamming_witness_row(n, 0.0939288).is_ok();
        t.check(ok, || format!("witness row at n={n}"));
    }
    t.report
}

/// A fault for testing the suites themselves: compress, then drop the lex-largest point.
pub fn faulty_compress() -> CompressFn {
    Arc::new(|a: &PointSet, j: u64| {
        let c = compress_mask(a, j)?;
        let mut pts: Vec<Point> = c.points();
        pts.pop();
        PointSet::from_points(c.ctx().clone(), pts)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::EACH.iter().chain([&Suite::All]) {
            assert_eq!(s.name().parse::<Suite>().unwrap(), *s);
        }
        assert!("nope".parse::<Suite>().is_err());
    }

    #[test]
    fn quick_suites_pass() {
        let hooks = Hooks::default();
        for s in [
            Suite::Hs,
            Suite::Lattice,
            Suite::Entropy,
            Suite::Compression,
        ] {
            for rep in run_suite(s, 1, &hooks) {
                assert!(rep.passed(), "{rep:?}");
                assert!(rep.cases > 0);
            }
        }
    }

    #[test]
    fn faulty_compression_is_caught() {
        let hooks = Hooks {
            compress: faulty_compress(),
        };
        let rep = &run_suite(Suite::Compression, 1, &hooks)[0];
        assert!(rep.violations > 0);
        assert!(!rep.failures.is_empty());
    }
}
