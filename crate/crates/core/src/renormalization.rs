//! Restrictive intervals around turning points and renormalization towers.
//!
//! A restrictive interval of period `q` is a closed interval `J` around a
//! turning point `c` with `f^q(J) ⊆ J` whose first `q` iterates have pairwise
//! disjoint interiors. Candidates are symmetric: `J = [p, τ(p)]` (or the
//! reverse) for a point `p` of period dividing `q`, where `τ` exchanges the
//! two preimages near `c`.

use std::collections::BTreeSet;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::map_model::{PiecewiseMap, DEFAULT_WORD_BUDGET};
use crate::orbit_engine::fixed_points_of_iterate;
use crate::scalar::Rational;

#[derive(Clone, Debug, PartialEq)]
pub struct RestrictiveInterval {
    pub c: Rational,
    pub q: usize,
    pub j: Interval,
    /// `f^i(J)` for `i = 0..=q`; the last entry is contained in `J`.
    pub iterates: Vec<Interval>,
    /// Some pair of `f^i(J)`, `i < q`, shares a boundary point.
    pub boundary_touching: bool,
}

impl RestrictiveInterval {
    /// Re-checks both defining properties from scratch.
    pub fn verify(&self, f: &PiecewiseMap) -> Result<bool> {
        Ok(check(f, &self.c, self.q, &self.j)?.is_some())
    }
}

/// Checks `J` directly; `Some` carries the iterates and the touching flag.
fn check(f: &PiecewiseMap, c: &Rational, q: usize, j: &Interval) -> Result<Option<(Vec<Interval>, bool)>> {
    if !j.contains_interior(c) {
        return Ok(None);
    }
    let mut iterates = vec![j.clone()];
    let mut touching = false;
    for i in 1..=q {
        let next = f.image_interval(&iterates[i - 1])?;
        if i < q {
            for prev in &iterates {
                if prev.interiors_overlap(&next) {
                    return Ok(None);
                }
                touching |= !prev.intersect(&next).is_empty();
            }
        }
        iterates.push(next);
    }
    if !iterates[q].is_subset_of(j) {
        return Ok(None);
    }
    Ok(Some((iterates, touching)))
}

/// Every passing symmetric candidate of period `q`, largest first.
pub fn restrictive_candidates(f: &PiecewiseMap, c: &Rational, q: usize) -> Result<Vec<RestrictiveInterval>> {
    f.require_affine()?;
    if q < 2 {
        return Err(Error::InvalidArgument("a restrictive interval needs period at least 2".into()));
    }
    if !f.is_turning_point(c) {
        return Err(Error::NotTurningPoint(crate::scalar::fmt_rational(c)));
    }
    let tau_dom = f.tau_domain(c)?;
    let mut seen = BTreeSet::new();
    let mut found = Vec::new();
    for p in fixed_points_of_iterate(f, q, DEFAULT_WORD_BUDGET)?.into_keys() {
        if &p == c || !tau_dom.contains(&p) {
            continue;
        }
        let tp = f.tau(c, &p)?;
        let j = if p < tp { Interval::closed(p, tp) } else { Interval::closed(tp, p) };
        if !seen.insert((j.lo.clone(), j.hi.clone())) {
            continue;
        }
        if let Some((iterates, boundary_touching)) = check(f, c, q, &j)? {
            found.push(RestrictiveInterval { c: c.clone(), q, j, iterates, boundary_touching });
        }
    }
    found.sort_by(|a, b| b.j.length().cmp(&a.j.length()).then(a.j.lo.cmp(&b.j.lo)));
    Ok(found)
}

/// The largest restrictive interval of period `q` around `c`, if any.
pub fn restrictive_interval(f: &PiecewiseMap, c: &Rational, q: usize) -> Result<Option<RestrictiveInterval>> {
    Ok(restrictive_candidates(f, c, q)?.into_iter().next())
}

#[derive(Clone, Debug, PartialEq)]
pub struct RenormTower {
    pub c: Rational,
    pub q_max: usize,
    pub levels: Vec<RestrictiveInterval>,
}

impl RenormTower {
    pub fn depth(&self) -> usize {
        self.levels.len()
    }
}

/// Greedy tower: the smallest period with a restrictive interval, then the
/// smallest proper multiple with one nested inside the previous level.
pub fn renorm_tower(f: &PiecewiseMap, c: &Rational, q_max: usize) -> Result<RenormTower> {
    let mut levels: Vec<RestrictiveInterval> = Vec::new();
    let mut q = 1;
    'grow: loop {
        let mut next = 2 * q;
        while next <= q_max {
            let inside = restrictive_candidates(f, c, next)?
                .into_iter()
                .find(|r| levels.last().is_none_or(|l| r.j.is_subset_of(&l.j) && r.j != l.j));
            if let Some(r) = inside {
                levels.push(r);
                q = next;
                continue 'grow;
            }
            next += q;
        }
        break;
    }
    Ok(RenormTower { c: c.clone(), q_max, levels })
}

#[derive(Clone, Debug, PartialEq)]
pub struct TurningReport {
    pub tower: RenormTower,
    /// The tower reached the longest chain of proper multiples that fits
    /// below `q_max` (periods `2, 4, …, 2^k`).
    pub solenoid_suspect: bool,
}

pub fn is_renormalizable(f: &PiecewiseMap, q_max: usize) -> Result<Vec<TurningReport>> {
    let max_chain = if q_max < 2 { 0 } else { q_max.ilog2() as usize };
    f.turning_points()
        .par_iter()
        .map(|c| {
            let tower = renorm_tower(f, c, q_max)?;
            let solenoid_suspect = tower.depth() > 0 && tower.depth() >= max_chain;
            Ok(TurningReport { tower, solenoid_suspect })
        })
        .collect()
}
