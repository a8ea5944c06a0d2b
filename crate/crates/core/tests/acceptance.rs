//! Acceptance suite: one line per criterion, `PASS` or `FAIL` with details.
//! Runs without the libtest harness so the lines always show.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use imdyn::distortion::{empirical_distortion, extension_bound};
use imdyn::expansion_certifier::{expansion_n, gamma_n, kn_table, mane_growth, ManeOptions};
use imdyn::fixtures::{self, random_affine_map, RandomMapOptions};
use imdyn::interval::{Interval, IntervalSet};
use imdyn::map_model::{classify, monotone_branches, PiecewiseMap, DEFAULT_WORD_BUDGET};
use imdyn::measure_lab::{ulam_acip, vk_components, UlamOptions};
use imdyn::orbit_engine::{fixed_points_of_iterate, minimax_start, periodic_orbits};
use imdyn::renormalization::{is_renormalizable, renorm_tower, restrictive_interval};
use imdyn::scalar::{int, rat, to_f64, Rational, Scalar};
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 0x1D_2024;

const ORBIT_N_MAX: usize = 10;
const ORBIT_GRID: i64 = 1 << 17;
const ORBIT_TIME_LIMIT: Duration = Duration::from_secs(10);

const GROWTH_WINDOW: std::ops::RangeInclusive<usize> = 4..=10;
const GROWTH_ABOVE_ONE_BY: usize = 6;
const EXPANSION_LIMIT: usize = 12;

const DISTORTION_TRIALS: usize = 1000;
const DISTORTION_N_MAX: usize = 8;
const DISTORTION_TIME_LIMIT: Duration = Duration::from_secs(60);

const EXTENSION_TRIALS: usize = 200;
const MINIMAX_MAPS: usize = 500;
const MINIMAX_PERIOD_MAX: usize = 4;
const RENORM_Q_MAX: usize = 10;
const RENORM_ORACLE_DENOM: i64 = 60;

const TENT_BINS: usize = 1024;
const TENT_LINF: f64 = 1e-9;
const TENT_RESIDUAL: f64 = 1e-12;
const SKEW_BINS: usize = 128;
const SKEW_RESIDUAL: f64 = 1e-10;
const SKEW_L1: f64 = 0.02;
const SKEW_SAMPLES: usize = 1_000_000;
const SKEW_PUSHES: usize = 20;
const ACIP_TIME_LIMIT: Duration = Duration::from_secs(30);

const VK_MIN_COMPONENTS: usize = 50;
const GAMMA_PAIRS: usize = 50;
const GAMMA_N: usize = 6;
const MANE_N_MAX: usize = 10;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn timed(limit: Duration, start: Instant) -> Result<Duration, String> {
    let t = start.elapsed();
    ensure(t < limit, || format!("took {t:?}, limit {limit:?}"))?;
    Ok(t)
}

/// Sign changes and exact zeros of `f^n(x) - x` on the grid `i / ORBIT_GRID`.
///
/// The grid is dyadic, so it contains every turning point of `f^n` for the
/// full tent and `f^n(x) - x` is affine between neighbors: each cell holds at
/// most one root. Points are kept as integer numerators over `ORBIT_GRID`.
fn grid_fixed_point_count(f: &PiecewiseMap, n: usize) -> usize {
    let scale = Rational::from_integer(ORBIT_GRID.into());
    let pieces: Vec<(i64, i64, i64)> = (0..f.branch_count())
        .map(|b| {
            let (s, t) = f.affine(b).unwrap();
            let hi = (&f.branch_domain(b).hi * &scale).to_integer().try_into().unwrap();
            let t = t * &scale;
            assert!(s.is_integer() && t.is_integer(), "grid oracle needs dyadic branch data");
            (hi, s.to_integer().try_into().unwrap(), t.to_integer().try_into().unwrap())
        })
        .collect();
    let step = |i: i64| -> i64 {
        let &(_, s, t) = pieces.iter().find(|p| i <= p.0).unwrap();
        s * i + t
    };
    let sign = |i: i64| -> i64 {
        let mut y = i;
        for _ in 0..n {
            y = step(y);
        }
        (y - i).signum()
    };
    let signs: Vec<i64> = (0..=ORBIT_GRID).map(sign).collect();
    let zeros = signs.iter().filter(|s| **s == 0).count();
    let changes = signs.windows(2).filter(|w| w[0] * w[1] < 0).count();
    zeros + changes
}

fn c1_periodic_completeness() -> Outcome {
    let start = Instant::now();
    let tent = fixtures::full_tent();
    for n in 1..=ORBIT_N_MAX {
        let found = fixed_points_of_iterate(&tent, n, DEFAULT_WORD_BUDGET).map_err(|e| e.to_string())?.len();
        ensure(found == 1 << n, || format!("n={n}: {found} fixed points of f^n, expected {}", 1 << n))?;
        let grid = grid_fixed_point_count(&tent, n);
        ensure(grid == found, || format!("n={n}: grid oracle sees {grid}, enumeration {found}"))?;
    }
    let t = timed(ORBIT_TIME_LIMIT, start)?;
    Ok(format!("#Fix(f^n) = 2^n for n <= {ORBIT_N_MAX}, grid oracle agrees, {t:.2?}"))
}

fn c2_kn_growth() -> Outcome {
    let mut firsts = Vec::new();
    for (name, f) in fixtures::repelling_suite() {
        let depth = is_renormalizable(&f, RENORM_Q_MAX).map_err(|e| e.to_string())?;
        ensure(depth.iter().all(|r| r.tower.depth() == 0), || format!("{name} is renormalizable"))?;
        let table = kn_table(&f, *GROWTH_WINDOW.end()).map_err(|e| e.to_string())?;
        let mins: Vec<Option<Rational>> = table.rows.iter().map(|r| r.min.clone()).collect();
        for n in GROWTH_WINDOW {
            let (a, b) = (&mins[n - 2], &mins[n - 1]);
            if n > *GROWTH_WINDOW.start() {
                ensure(matches!((a, b), (Some(a), Some(b)) if a < b), || {
                    format!("{name}: K_{} = {a:?}, K_{n} = {b:?} not increasing", n - 1)
                })?;
            }
        }
        let first = (1..=*GROWTH_WINDOW.end())
            .find(|&n| (n..=*GROWTH_WINDOW.end()).all(|m| mins[m - 1].as_ref().is_some_and(|k| k > &Rational::one())));
        ensure(first.is_some_and(|n| n <= GROWTH_ABOVE_ONE_BY), || format!("{name}: K_n > 1 only from {first:?}"))?;
        firsts.push(format!("{name}:{}", first.unwrap()));
    }
    Ok(format!("strictly increasing on 4..=10, K_n > 1 from n = [{}]", firsts.join(" ")))
}

fn c3_eventual_expansion() -> Outcome {
    let mut ns = Vec::new();
    for (name, f) in fixtures::repelling_suite() {
        let out = expansion_n(&f, EXPANSION_LIMIT).map_err(|e| e.to_string())?;
        let cert = out.certificate().ok_or_else(|| format!("{name}: no N <= {EXPANSION_LIMIT}"))?;
        ensure(cert.min_expansion > Rational::one(), || format!("{name}: min expansion {}", cert.min_expansion))?;
        // Independent recomputation of min |Df^N| over all branches.
        let worst = monotone_branches(&f, cert.n, DEFAULT_WORD_BUDGET).unwrap().iter().map(|b| b.slope.abs()).min();
        ensure(worst.as_ref() == Some(&cert.min_expansion), || format!("{name}: branch minimum {worst:?}"))?;
        ns.push(format!("{name}:{}", cert.n));
    }
    let skew = fixtures::tent(rat(13, 10));
    let expands = expansion_n(&skew, EXPANSION_LIMIT).map_err(|e| e.to_string())?.certificate().is_some();
    let depth = is_renormalizable(&skew, RENORM_Q_MAX).map_err(|e| e.to_string())?[0].tower.depth();
    ensure(expands || depth >= 1, || "slope 13/10 tent: neither expanding nor renormalizable".into())?;
    Ok(format!("N = [{}]; slope 13/10 tent: expands={expands} depth={depth}", ns.join(" ")))
}

fn random_interval<R: Rng>(rng: &mut R) -> Interval {
    let (a, b) = (rng.gen_range(0..=4096), rng.gen_range(0..=4096));
    Interval::closed(rat(a.min(b), 4096), rat(a.max(b), 4096))
}

fn exact(s: &Scalar) -> Result<&Rational, String> {
    s.as_exact().ok_or_else(|| format!("expected an exact value, got {s}"))
}

fn c4_distortion_bound() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let opts = RandomMapOptions::default();
    let mut worst_ratio = 0.0f64;
    for trial in 0..DISTORTION_TRIALS {
        let f = random_affine_map(&mut rng, &opts);
        let j = random_interval(&mut rng);
        let n = rng.gen_range(1..=DISTORTION_N_MAX);
        let r = empirical_distortion(&f, &j, n).map_err(|e| e.to_string())?;
        let bound = r.bound_multiplicity.as_ref().ok_or_else(|| format!("trial {trial}: map not in the class"))?;
        let (emp, bound) = (exact(&r.empirical)?, exact(bound)?);
        ensure(emp <= bound, || format!("trial {trial}: distortion {emp} above bound {bound} on {j}, n={n}"))?;
        worst_ratio = worst_ratio.max(to_f64(&(emp / bound)));
    }
    let t = timed(DISTORTION_TIME_LIMIT, start)?;
    Ok(format!("{DISTORTION_TRIALS} trials, 0 violations, max empirical/bound = {worst_ratio:.4}, {t:.2?}"))
}

/// Sum of `|f^i(T)|` for `i < n`, exact.
fn length_sum(f: &PiecewiseMap, t: &Interval, n: usize) -> Rational {
    let mut cur = t.clone();
    let mut sum = Rational::zero();
    for _ in 0..n {
        sum += cur.length();
        cur = f.image_interval(&cur).unwrap();
    }
    sum
}

fn float_length_sum(f: &PiecewiseMap, a: f64, d: f64, n: usize) -> Option<f64> {
    let (mut lo, mut hi) = (a, d);
    let mut sum = 0.0;
    for _ in 0..n {
        if lo < 0.5 && 0.5 < hi {
            return None;
        }
        sum += hi - lo;
        let (x, y) = (f.eval_f64(lo), f.eval_f64(hi));
        (lo, hi) = (x.min(y), x.max(y));
    }
    Some(sum)
}

fn c5_extension_inequality() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 5);
    let opts = RandomMapOptions::default();
    let smooth = fixtures::smooth_unimodal();
    let k_smooth = classify(&smooth).lipschitz.expect("class D");
    let mut min_slack = f64::INFINITY;
    let (mut exact_trials, mut float_trials) = (0, 0);
    while exact_trials + float_trials < EXTENSION_TRIALS {
        if (exact_trials + float_trials) % 2 == 0 {
            let f = random_affine_map(&mut rng, &opts);
            let n = rng.gen_range(1..=5);
            let branches = monotone_branches(&f, n, DEFAULT_WORD_BUDGET).unwrap();
            let b = &branches[rng.gen_range(0..branches.len())];
            if b.domain.is_degenerate() {
                continue;
            }
            let mut cuts: Vec<Rational> =
                (0..3).map(|_| &b.domain.lo + b.domain.length() * rat(rng.gen_range(0..=1000), 1000)).collect();
            cuts.sort();
            let (a, bb, d) = (&cuts[0], &cuts[1], &cuts[2]);
            if a == bb || bb == d {
                continue;
            }
            let j = Interval::open(a.clone(), bb.clone());
            let t = Interval::open(a.clone(), d.clone());
            let (sigma, tau) = (length_sum(&f, &j, n), length_sum(&f, &t, n));
            let measured = (d - bb) / (bb - a);
            let bound = extension_bound(&Scalar::Exact(sigma), &Scalar::Exact(tau), &Scalar::Exact(int(0)))
                .map_err(|e| e.to_string())?;
            let bound = exact(&bound)?.clone();
            ensure(measured >= bound, || format!("affine: |T\\J|/|J| = {measured} below {bound}"))?;
            exact_trials += 1;
        } else {
            let n = rng.gen_range(1..=5);
            let mut p: Vec<f64> = (0..3).map(|_| rng.gen_range(0..=100_000) as f64 / 100_000.0).collect();
            p.sort_by(f64::total_cmp);
            let (a, b, d) = (p[0], p[1], p[2]);
            if a == b || b == d {
                continue;
            }
            let (Some(sigma), Some(tau)) = (float_length_sum(&smooth, a, b, n), float_length_sum(&smooth, a, d, n))
            else {
                continue;
            };
            let measured = (d - b) / (b - a);
            let bound = extension_bound(&Scalar::Float(sigma), &Scalar::Float(tau), &k_smooth)
                .map_err(|e| e.to_string())?
                .to_f64();
            ensure(measured >= bound, || format!("smooth: |T\\J|/|J| = {measured} below {bound}"))?;
            min_slack = min_slack.min(measured / bound);
            float_trials += 1;
        }
    }
    Ok(format!(
        "{exact_trials} affine trials (exact, K = 0) and {float_trials} smooth trials (K = {k_smooth}), 0 violations, min measured/bound on smooth = {min_slack:.4}"
    ))
}

fn c6_minimax_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 6);
    let opts = RandomMapOptions { min_branches: 2, max_branches: 4, grid: 12 };
    let mut checked = 0;
    for m in 0..MINIMAX_MAPS {
        let f = random_affine_map(&mut rng, &opts);
        let c = rat(rng.gen_range(1..=16), 4);
        for p in 1..=MINIMAX_PERIOD_MAX {
            let orbits = match periodic_orbits(&f, p) {
                Ok(o) => o,
                Err(imdyn::error::Error::NonIsolatedPeriodicPoints(_)) => continue,
                Err(e) => return Err(e.to_string()),
            };
            for o in orbits {
                let steps: Vec<Rational> = o.step_derivs.iter().map(Signed::abs).collect();
                let total: Rational = steps.iter().product();
                ensure(total == o.magnitude(), || format!("map {m}: step product {total} vs {}", o.magnitude()))?;
                if total > c {
                    continue;
                }
                let feasible: Vec<usize> = (0..p)
                    .filter(|&r| {
                        let mut acc = Rational::one();
                        (0..p).all(|i| {
                            acc *= &steps[(r + i) % p];
                            acc <= c
                        })
                    })
                    .collect();
                let got = minimax_start(&steps, &c).map_err(|e| e.to_string())?;
                ensure(!feasible.is_empty(), || format!("map {m}: no feasible rotation by brute force"))?;
                ensure(got == feasible.first().copied(), || {
                    format!("map {m}: minimax_start gave {got:?}, brute force {feasible:?}")
                })?;
                checked += 1;
            }
        }
    }
    ensure(checked > 0, || "no orbit with |Df^n| <= C".into())?;
    Ok(format!("{checked} orbits across {MINIMAX_MAPS} maps, every one has a feasible rotation and it matches brute force"))
}

/// Every symmetric `[p, 1 - p]` with `p = a/b`, `b <= RENORM_ORACLE_DENOM`,
/// tested directly against the two defining properties.
fn brute_force_restrictive(f: &PiecewiseMap, q: usize) -> Vec<Interval> {
    let mut out = Vec::new();
    for b in 2..=RENORM_ORACLE_DENOM {
        for a in 1..b {
            let p = rat(a, b);
            if p >= rat(1, 2) {
                break;
            }
            let j = Interval::closed(p.clone(), int(1) - &p);
            let mut it = vec![j.clone()];
            for _ in 0..q {
                it.push(f.image_interval(it.last().unwrap()).unwrap());
            }
            let disjoint = (0..q).all(|i| (i + 1..q).all(|k| !it[i].interiors_overlap(&it[k])));
            if disjoint && it[q].is_subset_of(&j) && !out.contains(&j) {
                out.push(j);
            }
        }
    }
    out
}

fn c7_renormalization() -> Outcome {
    let c = rat(1, 2);
    let skew = fixtures::tent(rat(13, 10));
    let r = restrictive_interval(&skew, &c, 2).map_err(|e| e.to_string())?.ok_or("slope 13/10: no q = 2 interval")?;
    ensure(r.verify(&skew).unwrap(), || "slope 13/10: interval fails re-verification".into())?;
    let fq = r.iterates.last().unwrap();
    ensure(fq.is_subset_of(&r.j) && !r.iterates[0].interiors_overlap(&r.iterates[1]), || "invariants".into())?;
    let oracle = brute_force_restrictive(&skew, 2);
    ensure(oracle.contains(&r.j), || format!("oracle {oracle:?} misses {}", r.j))?;

    let tent = fixtures::full_tent();
    let depth = renorm_tower(&tent, &c, RENORM_Q_MAX).map_err(|e| e.to_string())?.depth();
    ensure(depth == 0, || format!("full tent depth {depth}"))?;
    for q in 2..=RENORM_Q_MAX {
        let found = brute_force_restrictive(&tent, q);
        ensure(found.is_empty(), || format!("oracle finds {found:?} for the full tent at q = {q}"))?;
    }
    Ok(format!("slope 13/10: q=2 J={} touching={}; full tent depth 0; oracle agrees", r.j, r.boundary_touching))
}

fn c8_acip() -> Outcome {
    let start = Instant::now();
    let tent = fixtures::full_tent();
    let cert = expansion_n(&tent, EXPANSION_LIMIT).unwrap();
    let d = ulam_acip(&tent, &UlamOptions::new(TENT_BINS), cert.certificate()).map_err(|e| e.to_string())?;
    let linf = d.density.iter().map(|x| (x - 1.0).abs()).fold(0.0, f64::max);
    ensure(linf < TENT_LINF, || format!("tent L∞ error {linf}"))?;
    ensure(d.invariance_residual < TENT_RESIDUAL, || format!("tent residual {}", d.invariance_residual))?;

    let f = fixtures::three_halves();
    let cert = expansion_n(&f, EXPANSION_LIMIT).unwrap();
    let n = cert.certificate().map(|c| c.n);
    ensure(n == Some(1), || format!("(3, -3/2) certificate N = {n:?}"))?;
    let u = ulam_acip(&f, &UlamOptions::new(SKEW_BINS), cert.certificate()).map_err(|e| e.to_string())?;
    ensure(u.invariance_residual < SKEW_RESIDUAL, || format!("(3, -3/2) residual {}", u.invariance_residual))?;
    let integral: f64 = u.masses.iter().sum();
    ensure((integral - 1.0).abs() < 1e-12, || format!("density integrates to {integral}"))?;

    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 8);
    let mut hist = vec![0usize; SKEW_BINS];
    for _ in 0..SKEW_SAMPLES {
        let mut x: f64 = rng.gen();
        for _ in 0..SKEW_PUSHES {
            x = f.eval_f64(x).clamp(0.0, 1.0);
        }
        hist[((x * SKEW_BINS as f64) as usize).min(SKEW_BINS - 1)] += 1;
    }
    let l1: f64 = hist.iter().zip(&u.masses).map(|(h, m)| (*h as f64 / SKEW_SAMPLES as f64 - m).abs()).sum();
    ensure(l1 < SKEW_L1, || format!("(3, -3/2) L1 against pushforward {l1}"))?;
    let t = timed(ACIP_TIME_LIMIT, start)?;
    Ok(format!(
        "tent L∞={linf:e} residual={:e}; (3,-3/2) residual={:e} L1={l1:.4}; {t:.2?}",
        d.invariance_residual, u.invariance_residual
    ))
}

fn c9_vk_endpoints() -> Outcome {
    let maps = vec![
        ("full_tent", fixtures::full_tent()),
        ("tent_19_10", fixtures::tent(rat(19, 10))),
        ("tent_13_10", fixtures::tent(rat(13, 10))),
        ("three_halves", fixtures::three_halves()),
        ("uneven_expanding", fixtures::uneven_expanding()),
    ];
    let (mut count, mut window_edges) = (0, 0);
    for (name, f) in maps {
        for c in f.turning_points() {
            let dom = f.tau_domain(&c).unwrap();
            let w = Interval::open(&c - (&c - &dom.lo) / int(2), &c + (&dom.hi - &c) / int(2));
            for k in 2..=6 {
                for v in vk_components(&f, &c, &w, k).map_err(|e| e.to_string())? {
                    for a in [&v.interval.lo, &v.interval.hi] {
                        if a == &w.lo || a == &w.hi {
                            window_edges += 1;
                            continue;
                        }
                        let mut y = a.clone();
                        for _ in 0..k {
                            y = f.eval_exact(&y).unwrap();
                        }
                        let ta = f.tau(&c, a).unwrap();
                        ensure(&y == a || y == ta, || format!("{name} k={k}: endpoint {a} of {} maps to {y}", v.interval))?;
                    }
                    count += 1;
                }
            }
        }
    }
    ensure(count >= VK_MIN_COMPONENTS, || format!("only {count} components"))?;
    Ok(format!(
        "{count} components, every endpoint a inside the window has f^k(a) in {{a, τ(a)}} ({window_edges} window-edge ends skipped)"
    ))
}

fn c10_gamma_and_growth() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 10);
    let opts = RandomMapOptions::default();
    for pair in 0..GAMMA_PAIRS {
        let f = random_affine_map(&mut rng, &opts);
        let u = IntervalSet::from_interval(random_interval(&mut rng).interior());
        let g = gamma_n(&f, &u, GAMMA_N).map_err(|e| e.to_string())?;
        for k in 0..GAMMA_N {
            ensure(g.levels[k + 1].is_subset_of(&g.levels[k]), || format!("pair {pair}: Γ_{} ⊄ Γ_{k}", k + 1))?;
        }
    }
    let mut lambdas = Vec::new();
    for (name, f) in fixtures::repelling_suite() {
        let delta = rat(1, 20);
        let u = IntervalSet::from_intervals(
            f.turning_points().iter().map(|c| Interval::open(c - &delta, c + &delta)).collect(),
        );
        let r = mane_growth(&f, &u, MANE_N_MAX, &ManeOptions::default()).map_err(|e| e.to_string())?;
        let from = (1..=MANE_N_MAX).find(|&n| r.minima[n - 1].as_ref().is_none_or(|m| m >= &Rational::one()));
        ensure(from.is_some(), || format!("{name}: min |Df^n| < 1 for all n <= {MANE_N_MAX}"))?;
        let lambda = r.lambda.ok_or_else(|| format!("{name}: no fit"))?;
        ensure(lambda > 1.0, || format!("{name}: λ = {lambda}"))?;
        lambdas.push(format!("{name}:{lambda:.3}"));
    }
    Ok(format!("{GAMMA_PAIRS} nested chains exact; λ = [{}]", lambdas.join(" ")))
}

fn main() -> ExitCode {
    #[allow(clippy::type_complexity)]
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("periodic-orbit completeness", c1_periodic_completeness),
        ("K_n growth", c2_kn_growth),
        ("eventual expansion", c3_eventual_expansion),
        ("multiplicity distortion bound", c4_distortion_bound),
        ("extension inequality", c5_extension_inequality),
        ("minimax starting point", c6_minimax_oracle),
        ("restrictive intervals", c7_renormalization),
        ("invariant density", c8_acip),
        ("V_k endpoints", c9_vk_endpoints),
        ("avoidance sets and growth", c10_gamma_and_growth),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let res = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let t = start.elapsed();
        match res {
            Ok(detail) => println!("acceptance {:>2} {name}: PASS ({detail}) [{t:.2?}]", i + 1),
            Err(why) => {
                failed += 1;
                println!("acceptance {:>2} {name}: FAIL ({why}) [{t:.2?}]", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
