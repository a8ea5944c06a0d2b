//! `imdyn`: batch analyses of piecewise monotone interval maps.
//!
//! Every subcommand reads a map file, writes its report to `--out` (or to
//! stdout when absent) and prints a one-line summary. Exit status is 0 on
//! success, 1 on input errors and 2 when the analysis refuses or fails to
//! certify.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use imdyn::distortion::empirical_distortion;
use imdyn::error::Error;
use imdyn::expansion_certifier::{expansion_n, kn_table, mane_growth, ExpansionOutcome, ManeOptions};
use imdyn::interval::{Interval, IntervalSet};
use imdyn::map_model::{parse_map, PiecewiseMap};
use imdyn::measure_lab::{first_return, omega_approx, symmetric_interval, ulam_acip, UlamOptions};
use imdyn::orbit_engine::periodic_orbits;
use imdyn::renormalization::is_renormalizable;
use imdyn::report;
use imdyn::scalar::{fmt_rational, parse_rational, Rational};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Seed used by `distort` when `--seed` is not given.
const DEFAULT_SEED: u64 = 20_240_601;

#[derive(Parser, Debug)]
#[command(name = "imdyn", version, about = "Exact analyses of piecewise monotone interval maps")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args, Debug)]
struct Common {
    /// Map definition file.
    map: PathBuf,
    /// Report destination; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Periodic orbits of a given minimal period.
    Orbits {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 1)]
        period: usize,
    },
    /// Minimal |Df^n| along periodic orbits, n = 1..=nmax.
    Kn {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 8)]
        nmax: usize,
    },
    /// Smallest N <= limit with |Df^N| > 1 everywhere.
    Expand {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 12)]
        limit: usize,
    },
    /// Growth of |Df^n| on points avoiding U and the periodic basins.
    Mane {
        #[command(flatten)]
        common: Common,
        /// Open intervals `lo,hi;lo,hi;…`.
        #[arg(long)]
        avoid: String,
        #[arg(long, default_value_t = 10)]
        nmax: usize,
    },
    /// Restrictive intervals around each turning point.
    Renorm {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 16)]
        qmax: usize,
    },
    /// Distortion of random iterates against the bounds.
    Distort {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
    /// Finite-time eps-covers of the orbit of a turning point.
    Omega {
        #[command(flatten)]
        common: Common,
        /// Index of the turning point, left to right.
        #[arg(long, default_value_t = 0)]
        seed_point: usize,
        #[arg(long, default_value_t = 1000)]
        burn: usize,
        #[arg(long, default_value_t = 100_000)]
        steps: usize,
        #[arg(long, value_delimiter = ',', default_value = "0.01,0.001,0.0001")]
        eps_list: Vec<f64>,
    },
    /// Ulam estimate of the invariant density.
    Acip {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 256)]
        bins: usize,
        /// Largest N tried for the expansion certificate.
        #[arg(long, default_value_t = 12)]
        limit: usize,
    },
    /// First-return structure of the symmetric interval at `base`.
    Returns {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        base: String,
        #[arg(long, default_value_t = 8)]
        horizon: usize,
        /// Index of the turning point, left to right.
        #[arg(long, default_value_t = 0)]
        turning: usize,
    },
}

enum Failure {
    Input(String),
    Refused(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Precondition(_)
            | Error::NonHyperbolic { .. }
            | Error::BudgetExceeded { .. }
            | Error::RequiresAffine
            | Error::NonIsolatedPeriodicPoints(_) => Failure::Refused(e.to_string()),
            _ => Failure::Input(e.to_string()),
        }
    }
}

struct Done {
    report: String,
    summary: String,
    /// Set when the report was written but the analysis did not certify.
    refused: bool,
}

fn done(report: String, summary: String) -> Result<Done, Failure> {
    Ok(Done { report, summary, refused: false })
}

fn load(path: &Path) -> Result<PiecewiseMap, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    Ok(parse_map(&text)?)
}

fn turning(f: &PiecewiseMap, index: usize) -> Result<Rational, Failure> {
    let cs = f.turning_points();
    cs.get(index)
        .cloned()
        .ok_or_else(|| Failure::Input(format!("turning point index {index} out of range ({} turning points)", cs.len())))
}

fn parse_avoid(text: &str) -> Result<IntervalSet, Failure> {
    let mut parts = Vec::new();
    for piece in text.split(';').map(str::trim).filter(|p| !p.is_empty()) {
        let (lo, hi) = piece.split_once(',').ok_or_else(|| Failure::Input(format!("expected lo,hi in `{piece}`")))?;
        let (lo, hi) = (parse_rational(lo)?, parse_rational(hi)?);
        if lo >= hi {
            return Err(Failure::Input(format!("empty interval `{piece}`")));
        }
        parts.push(Interval::open(lo, hi));
    }
    Ok(IntervalSet::from_intervals(parts))
}

fn random_point<R: Rng>(rng: &mut R, f: &PiecewiseMap) -> Rational {
    const GRID: i64 = 1 << 12;
    let t = Rational::new(rng.gen_range(0..=GRID).into(), GRID.into());
    f.lo() + (f.hi() - f.lo()) * t
}

fn run(command: &Command) -> Result<Done, Failure> {
    match command {
        Command::Orbits { common, period } => {
            if *period == 0 {
                return Err(Failure::Input("--period must be at least 1".into()));
            }
            let f = load(&common.map)?;
            let orbits = periodic_orbits(&f, *period)?;
            done(report::orbits_csv(*period, &orbits), format!("period={period} orbits={}", orbits.len()))
        }
        Command::Kn { common, nmax } => {
            let f = load(&common.map)?;
            let table = kn_table(&f, *nmax)?;
            let last = table.rows.iter().rev().find_map(|r| r.min.as_ref());
            let summary = format!("nmax={nmax} K_last={}", last.map(fmt_rational).unwrap_or_default());
            done(report::kn_csv(&table), summary)
        }
        Command::Expand { common, limit } => {
            let f = load(&common.map)?;
            let outcome = expansion_n(&f, *limit)?;
            let report = report::certificate_kv(&outcome);
            Ok(match &outcome {
                ExpansionOutcome::Certified(c) => Done {
                    report,
                    summary: format!("N={} min_expansion={}", c.n, fmt_rational(&c.min_expansion)),
                    refused: false,
                },
                ExpansionOutcome::Refused { n_limit, min_expansion, worst_word } => Done {
                    report,
                    summary: format!(
                        "refused: min |Df^{n_limit}| = {} on word {worst_word}",
                        fmt_rational(min_expansion)
                    ),
                    refused: true,
                },
            })
        }
        Command::Mane { common, avoid, nmax } => {
            let u = parse_avoid(avoid)?;
            let f = load(&common.map)?;
            let r = mane_growth(&f, &u, *nmax, &ManeOptions::default())?;
            let summary = format!(
                "lambda={} certified={}",
                r.lambda.map(|l| l.to_string()).unwrap_or_else(|| "none".into()),
                if r.certified { "yes" } else { "no" }
            );
            let refused = !r.certified;
            Ok(Done { report: report::mane_report(&r), summary, refused })
        }
        Command::Renorm { common, qmax } => {
            let f = load(&common.map)?;
            let reports = is_renormalizable(&f, *qmax)?;
            let depths: Vec<String> = reports.iter().map(|r| r.tower.depth().to_string()).collect();
            done(report::renorm_kv(&reports), format!("depth={}", depths.join(",")))
        }
        Command::Distort { common, trials, seed } => {
            let f = load(&common.map)?;
            let map_id = common.map.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let mut reports = Vec::with_capacity(*trials);
            for _ in 0..*trials {
                let (a, b) = (random_point(&mut rng, &f), random_point(&mut rng, &f));
                let j = if a <= b { Interval::closed(a, b) } else { Interval::closed(b, a) };
                let n = rng.gen_range(1..=8);
                reports.push(empirical_distortion(&f, &j, n)?);
            }
            let fails = reports.iter().filter(|r| !r.pass).count();
            let summary = format!("trials={trials} seed={seed} violations={fails}");
            Ok(Done { report: report::distortion_csv(&map_id, &reports), summary, refused: fails > 0 })
        }
        Command::Omega { common, seed_point, burn, steps, eps_list } => {
            let f = load(&common.map)?;
            let c = turning(&f, *seed_point)?;
            let o = omega_approx(&f, &c, *burn, *steps, eps_list)?;
            let lengths: Vec<String> = o.levels.iter().map(|l| l.cover_length.to_string()).collect();
            done(report::omega_csv(&o), format!("c={} cover_length={}", fmt_rational(&c), lengths.join(",")))
        }
        Command::Acip { common, bins, limit } => {
            let f = load(&common.map)?;
            let outcome = expansion_n(&f, *limit)?;
            let cert = outcome.certificate().ok_or_else(|| {
                Failure::Refused(format!("no N <= {limit} with |Df^N| > 1; the density estimate needs one"))
            })?;
            let d = ulam_acip(&f, &UlamOptions::new(*bins), Some(cert))?;
            let summary = format!(
                "bins={bins} N={} residual={} converged={}",
                d.certificate_n,
                d.invariance_residual,
                if d.converged { "yes" } else { "no" }
            );
            let refused = !d.converged;
            Ok(Done { report: report::density_csv(&d), summary, refused })
        }
        Command::Returns { common, base, horizon, turning: index } => {
            let x = parse_rational(base)?;
            let f = load(&common.map)?;
            let c = turning(&f, *index)?;
            let s = symmetric_interval(&f, &c, &x)?;
            if s.is_degenerate() {
                return Err(Failure::Input("--base must differ from the turning point".into()));
            }
            let r = first_return(&f, &s, *horizon)?;
            let summary = format!(
                "U=({},{}) components={} unresolved_length={}",
                fmt_rational(&s.u.lo),
                fmt_rational(&s.u.hi),
                r.components.len(),
                fmt_rational(&r.unresolved.length())
            );
            done(report::returns_csv(&r), summary)
        }
    }
}

fn out_path(command: &Command) -> Option<&Path> {
    let common = match command {
        Command::Orbits { common, .. }
        | Command::Kn { common, .. }
        | Command::Expand { common, .. }
        | Command::Mane { common, .. }
        | Command::Renorm { common, .. }
        | Command::Distort { common, .. }
        | Command::Omega { common, .. }
        | Command::Acip { common, .. }
        | Command::Returns { common, .. } => common,
    };
    common.out.as_deref()
}

fn configure_threads() -> Result<(), String> {
    let Ok(v) = std::env::var("IMDYN_THREADS") else {
        return Ok(());
    };
    let n: usize = v.trim().parse().map_err(|_| format!("IMDYN_THREADS must be a positive integer, got `{v}`"))?;
    if n == 0 {
        return Err("IMDYN_THREADS must be at least 1".into());
    }
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Err(msg) = configure_threads() {
        eprintln!("error: {msg}");
        return ExitCode::from(1);
    }
    match run(&cli.command) {
        Ok(d) => {
            match out_path(&cli.command) {
                Some(path) => {
                    if let Err(e) = std::fs::write(path, &d.report) {
                        eprintln!("error: {}: {e}", path.display());
                        return ExitCode::from(1);
                    }
                    println!("{}", d.summary);
                }
                None => {
                    print!("{}", d.report);
                    eprintln!("{}", d.summary);
                }
            }
            ExitCode::from(if d.refused { 2 } else { 0 })
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Refused(msg)) => {
            eprintln!("refused: {msg}");
            ExitCode::from(2)
        }
    }
}
