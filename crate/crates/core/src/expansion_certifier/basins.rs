use std::collections::BTreeSet;
use std::ops::Bound;

use num_traits::One;

use crate::error::{Error, Result};
use crate::interval::{Interval, IntervalSet};
use crate::map_model::{monotone_branches, PiecewiseMap, DEFAULT_WORD_BUDGET};
use crate::orbit_engine::{fixed_points_of_iterate, periodic_orbits_with_budget, Hyperbolicity, PeriodicOrbit};
use crate::scalar::fmt_rational;

#[derive(Clone, Debug, PartialEq)]
pub struct Basin {
    pub orbit: PeriodicOrbit,
    /// Immediate basin component around each orbit point, in orbit order.
    pub components: Vec<Interval>,
}

/// Attractors of period at most `period_bound` with their immediate basins.
/// Attractors of larger period are not searched for.
#[derive(Clone, Debug, PartialEq)]
pub struct BasinSet {
    pub period_bound: usize,
    pub basins: Vec<Basin>,
}

impl BasinSet {
    pub fn union(&self) -> IntervalSet {
        IntervalSet::from_intervals(self.basins.iter().flat_map(|b| b.components.iter().cloned()).collect())
    }

    /// The union as an open set: a component closed at an end of the domain
    /// is extended past it, so that removing it from the domain also removes
    /// that end.
    pub fn open_union(&self, f: &PiecewiseMap) -> IntervalSet {
        let one = crate::scalar::Rational::one();
        let parts = self
            .union()
            .into_components()
            .into_iter()
            .map(|mut c| {
                if c.lo_closed && &c.lo == f.lo() {
                    c.lo = &c.lo - &one;
                    c.lo_closed = false;
                }
                if c.hi_closed && &c.hi == f.hi() {
                    c.hi = &c.hi + &one;
                    c.hi_closed = false;
                }
                c
            })
            .collect();
        IntervalSet::from_intervals(parts)
    }
}

pub fn immediate_basins(f: &PiecewiseMap, period_bound: usize) -> Result<BasinSet> {
    immediate_basins_with_budget(f, period_bound, DEFAULT_WORD_BUDGET)
}

/// For an attracting point `x` of period `p` and `g = f^p`, a boundary point
/// `b` of the immediate basin satisfies `g(b) ∈ {a, b}` where `a` is the
/// other boundary point. So `b` is a fixed point of `g²` or maps by `g` to a
/// fixed point of `g`, other than `x`. No such point lies inside the basin,
/// hence each end is the nearest such point, or the domain end (then
/// included) when there is none.
pub fn immediate_basins_with_budget(f: &PiecewiseMap, period_bound: usize, budget: u128) -> Result<BasinSet> {
    f.require_affine()?;
    let mut basins = Vec::new();
    for p in 1..=period_bound {
        let attractors: Vec<PeriodicOrbit> = periodic_orbits_with_budget(f, p, budget)?
            .into_iter()
            .filter(|o| o.hyperbolicity == Hyperbolicity::Attracting)
            .collect();
        if attractors.is_empty() {
            continue;
        }
        let fix_g: BTreeSet<_> = fixed_points_of_iterate(f, p, budget)?.into_keys().collect();
        let fix_g2: BTreeSet<_> = fixed_points_of_iterate(f, 2 * p, budget)?.into_keys().collect();
        let g_branches = monotone_branches(f, p, budget)?;
        for orbit in attractors {
            let mut components = Vec::with_capacity(p);
            for x in &orbit.points {
                let mut boundary: BTreeSet<_> = fix_g2.iter().filter(|&y| y != x).cloned().collect();
                for z in fix_g.iter().filter(|&z| z != x) {
                    for b in &g_branches {
                        let y = (z - &b.intercept) / &b.slope;
                        if b.domain.contains(&y) {
                            boundary.insert(y);
                        }
                    }
                }
                let right = boundary.range((Bound::Excluded(x), Bound::Unbounded)).next().cloned();
                let left = boundary.range((Bound::Unbounded, Bound::Excluded(x))).next_back().cloned();
                let j = Interval::new(
                    left.clone().unwrap_or_else(|| f.lo().clone()),
                    right.clone().unwrap_or_else(|| f.hi().clone()),
                    left.is_none(),
                    right.is_none(),
                );
                let mut image = j.closure();
                for _ in 0..p {
                    image = f.image_interval(&image)?;
                }
                if !image.is_subset_of(&j.closure()) {
                    return Err(Error::Precondition(format!(
                        "basin candidate {j} of {} is not invariant",
                        fmt_rational(x)
                    )));
                }
                components.push(j);
            }
            basins.push(Basin { orbit, components });
        }
    }
    Ok(BasinSet { period_bound, basins })
}
