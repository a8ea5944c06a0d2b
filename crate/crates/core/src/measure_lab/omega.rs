use std::collections::BTreeMap;

use super::{nice_test, Niceness, SymmetricInterval};
use crate::error::{Error, Result};
use crate::map_model::PiecewiseMap;
use crate::scalar::{fmt_rational, to_f64, Rational};

#[derive(Clone, Debug, PartialEq)]
pub struct OmegaLevel {
    pub eps: f64,
    /// Merged `[p - eps, p + eps]` over the tail points.
    pub cover: Vec<(f64, f64)>,
    pub cover_length: f64,
}

impl OmegaLevel {
    pub fn component_count(&self) -> usize {
        self.cover.len()
    }
}

/// A finite-time picture of `ω(seed)`: the orbit after `burn` steps, and
/// `eps`-covers of it for each requested `eps`.
#[derive(Clone, Debug, PartialEq)]
pub struct OmegaApprox {
    pub seed: Rational,
    pub burn: usize,
    /// `f^{burn+1}(seed), …, f^{burn+steps}(seed)`, in floating point.
    pub tail: Vec<f64>,
    pub levels: Vec<OmegaLevel>,
}

/// The orbit is iterated in `f64`: exact iterates of a generic rational seed
/// grow without bound in size.
pub fn omega_approx(f: &PiecewiseMap, seed: &Rational, burn: usize, steps: usize, eps: &[f64]) -> Result<OmegaApprox> {
    if !f.in_domain(seed) {
        return Err(Error::outside(seed));
    }
    if let Some(bad) = eps.iter().find(|e| !(e.is_finite() && **e > 0.0)) {
        return Err(Error::InvalidArgument(format!("eps must be positive, got {bad}")));
    }
    let mut x = to_f64(seed);
    for _ in 0..burn {
        x = f.eval_f64(x);
    }
    let mut tail = Vec::with_capacity(steps);
    for _ in 0..steps {
        x = f.eval_f64(x);
        tail.push(x);
    }
    let mut sorted = tail.clone();
    sorted.sort_by(f64::total_cmp);
    sorted.dedup();
    let levels = eps.iter().map(|&e| cover(&sorted, e)).collect();
    Ok(OmegaApprox { seed: seed.clone(), burn, tail, levels })
}

fn cover(sorted: &[f64], eps: f64) -> OmegaLevel {
    let mut parts: Vec<(f64, f64)> = Vec::new();
    for &p in sorted {
        let (lo, hi) = (p - eps, p + eps);
        match parts.last_mut() {
            Some(last) if lo <= last.1 => last.1 = last.1.max(hi),
            _ => parts.push((lo, hi)),
        }
    }
    let cover_length = parts.iter().map(|(a, b)| b - a).sum();
    OmegaLevel { eps, cover: parts, cover_length }
}

#[derive(Clone, Debug, PartialEq)]
pub enum GapFailure {
    NotNice { point: Rational, k: usize },
    UnknownAtHorizon { point: Rational },
    /// An orbit point of `c` in `Q` but not in `P`, at this step.
    TailOutside { k: usize, point: Rational },
    RatioTooSmall { ratio: Rational },
}

#[derive(Clone, Debug, PartialEq)]
pub enum GapOutcome {
    /// The checkable hypotheses hold at the horizon. The tail of the orbit of
    /// `c` stands in for `ω(c)`.
    Pass { ratio: Rational, tail_len: usize, periodic_tail: bool },
    Fail(GapFailure),
}

/// Checks, at a finite horizon: both ends of `Q` are nice, the tail of the
/// orbit of `c` meets `Q` only inside `P`, and `|Q| / |P| >= λ`.
///
/// The tail is the whole cycle when the orbit of `c` is found to be
/// eventually periodic, and otherwise the second half of the first
/// `horizon` iterates.
pub fn density_gap_check(
    f: &PiecewiseMap,
    p: &SymmetricInterval,
    q: &SymmetricInterval,
    lambda: &Rational,
    horizon: usize,
) -> Result<GapOutcome> {
    if p.c != q.c {
        return Err(Error::InvalidArgument("P and Q must surround the same turning point".into()));
    }
    if !p.u.is_subset_of(&q.u) || p.is_degenerate() {
        return Err(Error::Precondition(format!("P = {} is not a nonempty subset of Q = {}", p.u, q.u)));
    }
    for end in [&q.x, q.partner()] {
        let side = super::symmetric_interval(f, &q.c, end)?;
        match nice_test(f, &side, horizon)? {
            Niceness::Nice { .. } => {}
            Niceness::NotNice(k) => return Ok(GapOutcome::Fail(GapFailure::NotNice { point: end.clone(), k })),
            Niceness::UnknownAtHorizon(_) => {
                return Ok(GapOutcome::Fail(GapFailure::UnknownAtHorizon { point: end.clone() }));
            }
        }
    }

    let mut orbit: Vec<Rational> = Vec::with_capacity(horizon + 1);
    let mut seen: BTreeMap<Rational, usize> = BTreeMap::new();
    let mut y = q.c.clone();
    let mut cycle_start = None;
    for k in 0..=horizon {
        if let Some(&j) = seen.get(&y) {
            cycle_start = Some(j);
            break;
        }
        seen.insert(y.clone(), k);
        orbit.push(y.clone());
        y = f.eval_exact(&y)?;
    }
    let first = cycle_start.unwrap_or(orbit.len() / 2).max(1);
    for (k, z) in orbit.iter().enumerate().skip(first) {
        if q.u.contains(z) && !p.u.contains(z) {
            return Ok(GapOutcome::Fail(GapFailure::TailOutside { k, point: z.clone() }));
        }
    }

    let ratio = q.length() / p.length();
    if &ratio < lambda {
        return Ok(GapOutcome::Fail(GapFailure::RatioTooSmall { ratio }));
    }
    Ok(GapOutcome::Pass { ratio, tail_len: orbit.len().saturating_sub(first), periodic_tail: cycle_start.is_some() })
}

impl std::fmt::Display for GapFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            GapFailure::NotNice { point, k } => write!(f, "not_nice point={} witness={k}", fmt_rational(point)),
            GapFailure::UnknownAtHorizon { point } => write!(f, "unknown_at_horizon point={}", fmt_rational(point)),
            GapFailure::TailOutside { k, point } => write!(f, "tail_outside step={k} point={}", fmt_rational(point)),
            GapFailure::RatioTooSmall { ratio } => write!(f, "ratio_too_small ratio={}", fmt_rational(ratio)),
        }
    }
}
