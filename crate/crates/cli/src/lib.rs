//! The `f2add` command line: set-file I/O, checks, scans, simulations and
//! self-verification. All output is deterministic for a fixed configuration,
//! whatever the worker count.

pub mod verify;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use f2add_core::entropy::{hamming_witness_table, optimize_ratio, small_alpha_limit};
use f2add_core::expansion::{
    check_downset_bog, check_expansion, check_hamming_expand, defect, empirical_defect_tail,
    q_exact, simulate_q_with, QSimConfig,
};
use f2add_core::group::{affine_hull, doubling, is_affine_subspace, sumset};
use f2add_core::io::{read_set_file, write_set_json, write_set_text};
use f2add_core::lex::{compress_to_fixpoint, hs, FixpointOptions};
use f2add_core::ratio::parse_ratio;
use f2add_core::scan::{
    cube_lemma_report, f_scan, g_exact, independent_points, ruzsa_cover, small_k_formula,
};
use f2add_core::{Error, IndexSet, Point, PointSet};
use serde::Serialize;
use serde_json::json;

pub use verify::{Hooks, Suite, SuiteReport};

/// Seed used whenever `--seed` is not given.
pub const DEFAULT_SEED: u64 = 20_240_601;

/// Version of the JSON envelope written by every command.
pub const SCHEMA_VERSION: u32 = 1;

pub const WORKERS_ENV: &str = "F2ADD_WORKERS";

#[derive(Parser, Debug)]
#[command(
    name = "f2add",
    version,
    about = "Sumsets, compressions and covering computations in F_2^n"
)]
pub struct Cli {
    /// Worker threads for parallel sections (default: all cores).
    #[arg(long, global = true, env = WORKERS_ENV)]
    pub workers: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, Default, ValueEnum)]
pub enum SetFormat {
    #[default]
    Text,
    Json,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum TableFormat {
    Csv,
    Json,
}

#[derive(Args, Debug)]
pub struct OutArgs {
    /// Write to this file instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Sumset A + B of two set files.
    Sumset {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[arg(long, value_enum, default_value_t)]
        format: SetFormat,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Doubling constant |A+A|/|A| and affine-hull data.
    Doubling {
        #[arg(long)]
        a: PathBuf,
    },
    /// Compress to a fixpoint over all J with |J| <= order.
    Compress {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        order: usize,
        /// Emit JSON with the compressed set and the list of applied compressions.
        #[arg(long)]
        trace: bool,
        #[arg(long, value_enum, default_value_t)]
        format: SetFormat,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Table of the Hopf–Stiefel function for 0 <= r, s <= max.
    HsTable {
        #[arg(long, default_value_t = 16)]
        max: u64,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Run the counter redistribution on three points given as 0/1 strings.
    Defect {
        #[arg(long)]
        x: String,
        #[arg(long)]
        xp: String,
        #[arg(long)]
        xpp: String,
    },
    /// Monte Carlo estimate of q(r) = P(D >= r).
    Qsim {
        #[arg(long)]
        r: u32,
        #[arg(long, default_value_t = 1_000_000)]
        trials: u64,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long, default_value_t = 64)]
        surplus_cap: u32,
        #[arg(long, default_value_t = 10_000)]
        max_positions: u32,
    },
    /// Empirical tail of the defect of uniform triples against q(r).
    DefectTail {
        #[arg(long, default_value_t = 30)]
        n: usize,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long, default_value_t = 3)]
        rmax: u32,
    },
    /// Find z in A + A' + A'' with at least |I| - r ones.
    CheckBog {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        ap: PathBuf,
        #[arg(long)]
        app: PathBuf,
        #[arg(long)]
        r: u32,
    },
    /// Check |A+B| >= 9^-r |A||B| (with --b) and/or the three-set expansion bound (with --ap and --app).
    CheckExpand {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: Option<PathBuf>,
        #[arg(long, requires = "app")]
        ap: Option<PathBuf>,
        #[arg(long, requires = "ap")]
        app: Option<PathBuf>,
        #[arg(long)]
        r: u32,
    },
    /// Scan every nonempty SMD of F_2^n and write one CSV row per set.
    ScanF {
        #[arg(long)]
        n: usize,
        /// Also write the running-maximum envelope as JSON.
        #[arg(long)]
        envelope: Option<PathBuf>,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Translate covers: exact minimum over subspaces, or the greedy Ruzsa cover.
    Cover {
        #[arg(long)]
        a: PathBuf,
        #[arg(long, conflicts_with = "ruzsa")]
        exact: bool,
        #[arg(long)]
        ruzsa: bool,
        /// Translates of B + B; defaults to A ∩ F_2^m with m = floor(log2 |A|).
        #[arg(long, requires = "ruzsa")]
        b: Option<PathBuf>,
    },
    /// Exact blow-up for doubling K < 9/5 and the independent-points witness.
    SmallK {
        /// Doubling bound as "p/q" or a decimal.
        #[arg(long)]
        k: String,
    },
    /// Maximize the entropy exponent ratio over alpha in (0, 1/10].
    OptimizeAlpha {
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
    /// Exact Hamming-ball witness counts against the asymptotic exponents.
    WitnessTable {
        /// Comma-separated dimensions.
        #[arg(long, value_delimiter = ',', default_values_t = [24u64, 32, 48, 64])]
        n: Vec<u64>,
        #[arg(long, default_value_t = 0.0939288)]
        alpha: f64,
        #[arg(long, value_enum, default_value_t = TableFormat::Csv)]
        format: TableFormat,
        #[command(flatten)]
        out: OutArgs,
    },
    /// |H_2(n)| / |H_1(n)| against (n - 1)/2.
    CubeTable {
        #[arg(long, default_value_t = 3)]
        from: u64,
        #[arg(long, default_value_t = 40)]
        to: u64,
        #[arg(long, default_value_t = 2.0)]
        c: f64,
    },
    /// Run a self-check suite; exits 1 on any violation.
    Verify {
        #[arg(long)]
        suite: Suite,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
}

/// How a successful run ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok,
    Violation,
}

/// Process exit codes.
pub mod exit {
    pub const OK: u8 = 0;
    pub const VIOLATION: u8 = 1;
    pub const USAGE: u8 = 2;
    pub const RESOURCE: u8 = 3;
}

/// Maps an error to its exit code: resource limits get 3, contradictions 1, the rest 2.
pub fn error_code(err: &anyhow::Error) -> u8 {
    match err.chain().find_map(|e| e.downcast_ref::<Error>()) {
        Some(Error::DimensionTooLarge { .. }) => exit::RESOURCE,
        Some(Error::Contradiction(_)) => exit::VIOLATION,
        _ => exit::USAGE,
    }
}

fn envelope<T: Serialize>(command: &str, result: T) -> anyhow::Result<String> {
    let doc = json!({
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "result": result,
    });
    Ok(serde_json::to_string_pretty(&doc)? + "\n")
}

fn emit(out: &mut dyn Write, path: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => out.write_all(text.as_bytes()).context("writing output"),
    }
}

fn read(path: &Path) -> anyhow::Result<PointSet> {
    read_set_file(path).with_context(|| format!("reading set file {}", path.display()))
}

fn write_set(a: &PointSet, format: SetFormat) -> String {
    match format {
        SetFormat::Text => write_set_text(a),
        SetFormat::Json => write_set_json(a) + "\n",
    }
}

fn parse_bits(s: &str) -> anyhow::Result<Point> {
    let mut bits = 0u64;
    if s.len() > 64 {
        bail!("at most 64 coordinates, got {}", s.len());
    }
    for (k, c) in s.chars().enumerate() {
        match c {
            '0' => {}
            '1' => bits |= 1 << k,
            _ => bail!("invalid coordinate {c:?} in {s:?}"),
        }
    }
    Ok(Point(bits))
}

/// Runs one command, writing its primary output to `out`.
pub fn run(cli: &Cli, hooks: &Hooks, out: &mut dyn Write) -> anyhow::Result<Status> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(w) = cli.workers {
        if w == 0 {
            bail!("--workers must be at least 1");
        }
        builder = builder.num_threads(w);
    }
    let pool = builder.build().context("starting worker pool")?;
    let mut buf = Vec::new();
    let status = pool.install(|| run_command(&cli.command, hooks, &mut buf));
    out.write_all(&buf).context("writing output")?;
    status
}

fn run_command(cmd: &Command, hooks: &Hooks, out: &mut Vec<u8>) -> anyhow::Result<Status> {
    match cmd {
        Command::Sumset {
            a,
            b,
            format,
            out: o,
        } => {
            let s = sumset(&read(a)?, &read(b)?)?;
            emit(out, o.out.as_deref(), &write_set(&s, *format))?;
        }
        Command::Doubling { a } => {
            let a = read(a)?;
            let d = doubling(&a)?;
            let hull = affine_hull(&a)?;
            let text = envelope(
                "doubling",
                json!({
                    "size": d.set_size,
                    "sumset_size": d.sumset_size,
                    "sigma": d.to_string(),
                    "sigma_value": d.to_f64(),
                    "hull_dimension": hull.dim(),
                    "is_affine_subspace": is_affine_subspace(&a),
                }),
            )?;
            emit(out, None, &text)?;
        }
        Command::Compress {
            input,
            order,
            trace,
            format,
            out: o,
        } => {
            let a = read(input)?;
            let (c, tr) = compress_to_fixpoint(&a, *order, FixpointOptions::default())?;
            let text = if *trace {
                envelope(
                    "compress",
                    json!({
                        "labels": c.ctx().labels(),
                        "points": c.iter().map(|p| p.to_bit_string(c.dim())).collect::<Vec<_>>(),
                        "passes": tr.passes,
                        "trace": tr,
                    }),
                )?
            } else {
                write_set(&c, *format)
            };
            emit(out, o.out.as_deref(), &text)?;
        }
        Command::HsTable { max, out: o } => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["r", "s", "hs"])?;
            for r in 0..=*max {
                for s in 0..=*max {
                    w.write_record([r.to_string(), s.to_string(), hs(r, s).to_string()])?;
                }
            }
            emit(out, o.out.as_deref(), &String::from_utf8(w.into_inner()?)?)?;
        }
        Command::Defect { x, xp, xpp } => {
            let n = x.len();
            if xp.len() != n || xpp.len() != n {
                bail!("the three points must have the same length");
            }
            let d = defect(n, parse_bits(x)?, parse_bits(xp)?, parse_bits(xpp)?);
            let ctx = IndexSet::standard(n)?;
            let text = envelope(
                "defect",
                json!({
                    "n": n,
                    "covered": d.covered_labels(&ctx),
                    "witness": d.witness.to_bit_string(n),
                    "defect": d.defect,
                }),
            )?;
            emit(out, None, &text)?;
        }
        Command::Qsim {
            r,
            trials,
            seed,
            surplus_cap,
            max_positions,
        } => {
            let cfg = QSimConfig {
                surplus_cap: *surplus_cap,
                max_positions: *max_positions,
            };
            let est = simulate_q_with(*r, *trials, *seed, cfg)?;
            let exact = q_exact(*r as i64)?;
            let z = if est.std_error > 0.0 {
                (est.estimate - exact) / est.std_error
            } else {
                f64::NAN
            };
            let text = envelope(
                "qsim",
                json!({
                    "r": est.r,
                    "trials": est.trials,
                    "successes": est.successes,
                    "seed": est.seed,
                    "surplus_cap": cfg.surplus_cap,
                    "max_positions": cfg.max_positions,
                    "estimate": est.estimate,
                    "stderr": est.std_error,
                    "exact": exact,
                    "z_score": if z.is_finite() { json!(z) } else { json!(null) },
                }),
            )?;
            emit(out, None, &text)?;
        }
        Command::DefectTail {
            n,
            trials,
            seed,
            rmax,
        } => {
            let tail = empirical_defect_tail(*n, *trials, *seed, *rmax)?;
            let ok = tail.rows.iter().all(|r| r.within(3.0));
            emit(out, None, &envelope("defect-tail", &tail)?)?;
            if !ok {
                return Ok(Status::Violation);
            }
        }
        Command::CheckBog { a, ap, app, r } => {
            let w = check_downset_bog(&read(a)?, &read(ap)?, &read(app)?, *r)?;
            let n = read(a)?.dim();
            let text = envelope(
                "check-bog",
                json!({
                    "witness": w.witness.to_bit_string(n),
                    "norm": w.norm,
                    "required": w.required,
                }),
            )?;
            emit(out, None, &text)?;
        }
        Command::CheckExpand { a, b, ap, app, r } => {
            let a = read(a)?;
            let mut holds = true;
            let mut result = serde_json::Map::new();
            if let Some(b) = b {
                let rep = check_hamming_expand(&a, &read(b)?, *r)?;
                holds &= rep.holds;
                result.insert("hamming".into(), serde_json::to_value(rep)?);
            }
            if let (Some(ap), Some(app)) = (ap, app) {
                let rep = check_expansion(&a, &read(ap)?, &read(app)?, *r)?;
                holds &= rep.holds;
                result.insert("triple".into(), serde_json::to_value(rep)?);
            }
            if result.is_empty() {
                bail!("give --b, or --ap and --app");
            }
            emit(out, None, &envelope("check-expand", result)?)?;
            if !holds {
                return Ok(Status::Violation);
            }
        }
        Command::ScanF {
            n,
            envelope: env,
            out: o,
        } => {
            let scan = f_scan(*n)?;
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record([
                "n",
                "size",
                "sigma_num",
                "sigma_den",
                "hull_dim",
                "hull_ratio",
                "g_exact",
                "base_ratio",
            ])?;
            for rec in &scan.records {
                let sigma = rec.sigma.value();
                w.write_record([
                    rec.n.to_string(),
                    rec.size.to_string(),
                    sigma.numer().to_string(),
                    sigma.denom().to_string(),
                    rec.hull_dim.to_string(),
                    rec.hull_ratio.to_string(),
                    rec.g_exact.map(|g| g.to_string()).unwrap_or_default(),
                    rec.base_ratio.to_string(),
                ])?;
            }
            emit(out, o.out.as_deref(), &String::from_utf8(w.into_inner()?)?)?;
            if let Some(p) = env {
                let text = envelope(
                    "scan-f",
                    json!({
                        "n": scan.n,
                        "note": "empirical envelope over SMDs of this dimension only; a lower bound",
                        "envelope": scan.envelope,
                    }),
                )?;
                emit(out, Some(p), &text)?;
            }
        }
        Command::Cover { a, exact, ruzsa, b } => {
            let a = read(a)?;
            let text = if *ruzsa {
                let b = match b {
                    Some(p) => read(p)?,
                    None => {
                        if a.is_empty() {
                            bail!("cover of the empty set");
                        }
                        let m = usize::BITS as usize - 1 - a.len().leading_zeros() as usize;
                        a.restrict_to_low(m)
                    }
                };
                let c = ruzsa_cover(&a, &b)?;
                let n = a.dim();
                envelope(
                    "cover",
                    json!({
                        "count": c.count,
                        "bound": c.bound.to_string(),
                        "difference_set_size": c.difference_set_size,
                        "representatives": c.representatives.iter().map(|p| p.to_bit_string(n)).collect::<Vec<_>>(),
                    }),
                )?
            } else {
                let _ = exact;
                let c = g_exact(&a)?;
                let n = a.dim();
                envelope(
                    "cover",
                    json!({
                        "count": c.count,
                        "subspace": c.subspace,
                        "representatives": c.representatives.iter().map(|p| p.to_bit_string(n)).collect::<Vec<_>>(),
                    }),
                )?
            };
            emit(out, None, &text)?;
        }
        Command::SmallK { k } => {
            let k = parse_ratio(k)?;
            let f = small_k_formula(k)?;
            let ip = independent_points(k)?;
            let text = envelope(
                "small-k",
                json!({
                    "k": k.to_string(),
                    "blow_up": f.to_string(),
                    "blow_up_value": f2add_core::ratio::ratio_to_f64(f),
                    "independent_points": ip,
                }),
            )?;
            emit(out, None, &text)?;
        }
        Command::OptimizeAlpha { tol } => {
            let o = optimize_ratio(*tol)?;
            let text = envelope(
                "optimize-alpha",
                json!({
                    "alpha": o.alpha,
                    "ratio": o.ratio,
                    "small_alpha": small_alpha_limit(8),
                }),
            )?;
            emit(out, None, &text)?;
        }
        Command::WitnessTable {
            n,
            alpha,
            format,
            out: o,
        } => {
            let rows = hamming_witness_table(n.iter().copied(), *alpha)?;
            let text = match format {
                TableFormat::Json => envelope("witness-table", &rows)?,
                TableFormat::Csv => {
                    let mut w = csv::Writer::from_writer(Vec::new());
                    for r in &rows {
                        w.serialize(r)?;
                    }
                    String::from_utf8(w.into_inner()?)?
                }
            };
            emit(out, o.out.as_deref(), &text)?;
        }
        Command::CubeTable { from, to, c } => {
            let rows = cube_lemma_report(*from..=*to, *c);
            let ok =
                rows.iter().all(|r| r.holds) && rows.windows(2).all(|w| w[0].ratio <= w[1].ratio);
            emit(out, None, &envelope("cube-table", &rows)?)?;
            if !ok {
                return Ok(Status::Violation);
            }
        }
        Command::Verify { suite, seed } => {
            let reports = verify::run_suite(*suite, *seed, hooks);
            let pass = reports.iter().all(SuiteReport::passed);
            let text = envelope(
                "verify",
                json!({ "suite": suite.name(), "seed": seed, "passed": pass, "suites": reports }),
            )?;
            emit(out, None, &text)?;
            if !pass {
                return Ok(Status::Violation);
            }
        }
    }
    Ok(Status::Ok)
}

/// Parses arguments and runs, returning the process exit code.
pub fn main_with<I, T>(args: I, hooks: &Hooks) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() {
                exit::USAGE
            } else {
                exit::OK
            });
        }
    };
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    match run(&cli, hooks, &mut lock) {
        Ok(Status::Ok) => ExitCode::from(exit::OK),
        Ok(Status::Violation) => ExitCode::from(exit::VIOLATION),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(error_code(&e))
        }
    }
}
