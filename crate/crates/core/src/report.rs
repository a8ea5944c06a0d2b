//! Text serializations of the analysis results: CSV tables and `key=value`
//! blocks. Rationals are written as `p/q` (or `p`), floats as the shortest
//! decimal that round-trips.

use std::fmt::Write as _;

use crate::distortion::DistortionReport;
use crate::expansion_certifier::{ExpansionOutcome, KnTable, ManeReport};
use crate::measure_lab::{OmegaApprox, ReturnStructure, UlamDensity};
use crate::orbit_engine::PeriodicOrbit;
use crate::renormalization::TurningReport;
use crate::scalar::{fmt_rational, Rational};

fn opt(q: &Option<Rational>) -> String {
    q.as_ref().map(fmt_rational).unwrap_or_default()
}

fn opt_f64(v: Option<f64>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

/// `period,word,point_0,…,point_{n-1},multiplier_left,multiplier_right,class`.
/// All orbits must share the period `n`.
pub fn orbits_csv(period: usize, orbits: &[PeriodicOrbit]) -> String {
    let mut out = String::from("period,word");
    for i in 0..period {
        write!(out, ",point_{i}").unwrap();
    }
    out.push_str(",multiplier_left,multiplier_right,class\n");
    for o in orbits {
        assert_eq!(o.period(), period, "mixed periods in one table");
        write!(out, "{},{}", o.period(), o.word).unwrap();
        for p in &o.points {
            write!(out, ",{}", fmt_rational(p)).unwrap();
        }
        writeln!(out, ",{},{},{}", opt(&o.multiplier.left), opt(&o.multiplier.right), o.hyperbolicity).unwrap();
    }
    out
}

/// `n,K_n,orbit_count,attaining_word`; empty cells for periods without orbits.
pub fn kn_csv(table: &KnTable) -> String {
    let mut out = String::from("n,K_n,orbit_count,attaining_word\n");
    for r in &table.rows {
        let word = r.attaining.as_ref().map(|o| o.word.to_string()).unwrap_or_default();
        writeln!(out, "{},{},{},{}", r.n, opt(&r.min), r.orbit_count, word).unwrap();
    }
    out
}

pub fn certificate_kv(outcome: &ExpansionOutcome) -> String {
    match outcome {
        ExpansionOutcome::Certified(c) => format!(
            "status=certified\nN={}\nmin_expansion={}\nwitness_word={}\n",
            c.n,
            fmt_rational(&c.min_expansion),
            c.worst_word
        ),
        ExpansionOutcome::Refused { n_limit, min_expansion, worst_word } => format!(
            "status=refused\nn_limit={n_limit}\nmin_expansion={}\nwitness_word={worst_word}\n",
            fmt_rational(min_expansion)
        ),
    }
}

/// Summary keys followed by the `n,min_deriv` table.
pub fn mane_report(r: &ManeReport) -> String {
    let mut out = String::new();
    writeln!(out, "avoided={}", r.avoided).unwrap();
    writeln!(out, "attractors={}", r.basins.basins.len()).unwrap();
    writeln!(out, "empty_from={}", r.empty_from.map(|n| n.to_string()).unwrap_or_default()).unwrap();
    writeln!(out, "lambda={}", opt_f64(r.lambda)).unwrap();
    writeln!(out, "C={}", opt_f64(r.c)).unwrap();
    writeln!(out, "certified={}", if r.certified { "yes" } else { "no" }).unwrap();
    out.push_str("\nn,min_deriv\n");
    for (i, m) in r.minima.iter().enumerate() {
        writeln!(out, "{},{}", i + 1, opt(m)).unwrap();
    }
    out
}

pub fn renorm_kv(reports: &[TurningReport]) -> String {
    let mut out = String::new();
    for r in reports {
        writeln!(out, "turning_point={}", fmt_rational(&r.tower.c)).unwrap();
        writeln!(out, "depth={}", r.tower.depth()).unwrap();
        writeln!(out, "solenoid_suspect={}", if r.solenoid_suspect { "yes" } else { "no" }).unwrap();
        for l in &r.tower.levels {
            writeln!(out, "q={}", l.q).unwrap();
            writeln!(out, "J=[{},{}]", fmt_rational(&l.j.lo), fmt_rational(&l.j.hi)).unwrap();
            writeln!(out, "boundary_touching={}", if l.boundary_touching { "yes" } else { "no" }).unwrap();
        }
    }
    out
}

pub fn distortion_csv(map_id: &str, reports: &[DistortionReport]) -> String {
    let mut out = String::from("map_id,J_lo,J_hi,n,empirical,S,bound_multiplicity,bound_sum,pass\n");
    let cell = |s: &Option<crate::scalar::Scalar>| s.as_ref().map(|s| s.to_string()).unwrap_or_default();
    for r in reports {
        writeln!(
            out,
            "{map_id},{},{},{},{},{},{},{},{}",
            fmt_rational(&r.j.lo),
            fmt_rational(&r.j.hi),
            r.n,
            r.empirical,
            r.s,
            cell(&r.bound_multiplicity),
            cell(&r.bound_sum),
            r.pass
        )
        .unwrap();
    }
    out
}

pub fn density_csv(d: &UlamDensity) -> String {
    let mut out = String::from("bin_lo,bin_hi,mass,density\n");
    for i in 0..d.bins() {
        let (lo, hi) = d.bin(i);
        writeln!(out, "{},{},{},{}", fmt_rational(lo), fmt_rational(hi), d.masses[i], d.density[i]).unwrap();
    }
    out
}

pub fn omega_csv(o: &OmegaApprox) -> String {
    let mut out = String::from("eps,cover_length,component_count\n");
    for l in &o.levels {
        writeln!(out, "{},{},{}", l.eps, l.cover_length, l.component_count()).unwrap();
    }
    out
}

pub fn returns_csv(r: &ReturnStructure) -> String {
    let mut out = String::from("comp_lo,comp_hi,transfer_time\n");
    for c in &r.components {
        writeln!(out, "{},{},{}", fmt_rational(&c.interval.lo), fmt_rational(&c.interval.hi), c.transfer_time).unwrap();
    }
    out
}
