//! Exact intervals and finite unions of intervals.
//!
//! Endpoints are rational and each end carries its own open/closed flag, so
//! preimages of open sets, complements and differences stay exact. An
//! [`IntervalSet`] is kept normalized: components sorted, pairwise disjoint
//! and never mergeable.

use std::cmp::Ordering;
use std::fmt;

use num_traits::{Signed, Zero};

use crate::scalar::{fmt_rational, Rational};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Interval {
    pub lo: Rational,
    pub hi: Rational,
    pub lo_closed: bool,
    pub hi_closed: bool,
}

impl Interval {
    pub fn new(lo: Rational, hi: Rational, lo_closed: bool, hi_closed: bool) -> Self {
        Interval { lo, hi, lo_closed, hi_closed }
    }

    pub fn closed(lo: Rational, hi: Rational) -> Self {
        Interval::new(lo, hi, true, true)
    }

    pub fn open(lo: Rational, hi: Rational) -> Self {
        Interval::new(lo, hi, false, false)
    }

    pub fn point(x: Rational) -> Self {
        Interval::closed(x.clone(), x)
    }

    pub fn is_empty(&self) -> bool {
        match self.lo.cmp(&self.hi) {
            Ordering::Greater => true,
            Ordering::Equal => !(self.lo_closed && self.hi_closed),
            Ordering::Less => false,
        }
    }

    pub fn is_degenerate(&self) -> bool {
        !self.is_empty() && self.lo == self.hi
    }

    pub fn length(&self) -> Rational {
        if self.is_empty() {
            Rational::zero()
        } else {
            &self.hi - &self.lo
        }
    }

    pub fn contains(&self, x: &Rational) -> bool {
        let above = if self.lo_closed { x >= &self.lo } else { x > &self.lo };
        let below = if self.hi_closed { x <= &self.hi } else { x < &self.hi };
        above && below
    }

    /// True when `x` lies strictly between the endpoints.
    pub fn contains_interior(&self, x: &Rational) -> bool {
        x > &self.lo && x < &self.hi
    }

    pub fn intersect(&self, other: &Interval) -> Interval {
        let (lo, lo_closed) = match self.lo.cmp(&other.lo) {
            Ordering::Greater => (self.lo.clone(), self.lo_closed),
            Ordering::Less => (other.lo.clone(), other.lo_closed),
            Ordering::Equal => (self.lo.clone(), self.lo_closed && other.lo_closed),
        };
        let (hi, hi_closed) = match self.hi.cmp(&other.hi) {
            Ordering::Less => (self.hi.clone(), self.hi_closed),
            Ordering::Greater => (other.hi.clone(), other.hi_closed),
            Ordering::Equal => (self.hi.clone(), self.hi_closed && other.hi_closed),
        };
        Interval { lo, hi, lo_closed, hi_closed }
    }

    /// `self ⊆ other`.
    pub fn is_subset_of(&self, other: &Interval) -> bool {
        if self.is_empty() {
            return true;
        }
        self.intersect(other) == *self
    }

    /// Interiors overlap (a shared endpoint does not count).
    pub fn interiors_overlap(&self, other: &Interval) -> bool {
        self.lo.clone().max(other.lo.clone()) < self.hi.clone().min(other.hi.clone())
    }

    pub fn closure(&self) -> Interval {
        Interval::closed(self.lo.clone(), self.hi.clone())
    }

    pub fn interior(&self) -> Interval {
        Interval::open(self.lo.clone(), self.hi.clone())
    }

    /// Image under `x ↦ slope·x + intercept` (slope nonzero).
    pub fn affine_image(&self, slope: &Rational, intercept: &Rational) -> Interval {
        let a = slope * &self.lo + intercept;
        let b = slope * &self.hi + intercept;
        if slope.is_positive() {
            Interval::new(a, b, self.lo_closed, self.hi_closed)
        } else {
            Interval::new(b, a, self.hi_closed, self.lo_closed)
        }
    }

    /// Preimage under `x ↦ slope·x + intercept` (slope nonzero).
    pub fn affine_preimage(&self, slope: &Rational, intercept: &Rational) -> Interval {
        let a = (&self.lo - intercept) / slope;
        let b = (&self.hi - intercept) / slope;
        if slope.is_positive() {
            Interval::new(a, b, self.lo_closed, self.hi_closed)
        } else {
            Interval::new(b, a, self.hi_closed, self.lo_closed)
        }
    }

    pub fn midpoint(&self) -> Rational {
        (&self.lo + &self.hi) / Rational::from_integer(2.into())
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}{},{}{}",
            if self.lo_closed { '[' } else { '(' },
            fmt_rational(&self.lo),
            fmt_rational(&self.hi),
            if self.hi_closed { ']' } else { ')' }
        )
    }
}

/// A finite union of intervals in normal form.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct IntervalSet {
    parts: Vec<Interval>,
}

impl IntervalSet {
    pub fn empty() -> Self {
        IntervalSet { parts: Vec::new() }
    }

    pub fn from_interval(i: Interval) -> Self {
        IntervalSet::from_intervals(vec![i])
    }

    pub fn from_intervals(parts: Vec<Interval>) -> Self {
        let mut parts: Vec<Interval> = parts.into_iter().filter(|p| !p.is_empty()).collect();
        parts.sort_by(|a, b| a.lo.cmp(&b.lo).then(b.lo_closed.cmp(&a.lo_closed)));
        let mut out: Vec<Interval> = Vec::with_capacity(parts.len());
        for p in parts {
            if let Some(last) = out.last_mut() {
                let joins = match p.lo.cmp(&last.hi) {
                    Ordering::Less => true,
                    Ordering::Equal => p.lo_closed || last.hi_closed,
                    Ordering::Greater => false,
                };
                if joins {
                    match p.hi.cmp(&last.hi) {
                        Ordering::Greater => {
                            last.hi = p.hi;
                            last.hi_closed = p.hi_closed;
                        }
                        Ordering::Equal => last.hi_closed |= p.hi_closed,
                        Ordering::Less => {}
                    }
                    continue;
                }
            }
            out.push(p);
        }
        IntervalSet { parts: out }
    }

    pub fn components(&self) -> &[Interval] {
        &self.parts
    }

    pub fn into_components(self) -> Vec<Interval> {
        self.parts
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn length(&self) -> Rational {
        self.parts.iter().map(Interval::length).fold(Rational::zero(), |a, b| a + b)
    }

    pub fn contains(&self, x: &Rational) -> bool {
        // Components are sorted; binary search on the lower end.
        let idx = self.parts.partition_point(|p| &p.lo <= x);
        idx > 0 && self.parts[idx - 1].contains(x)
    }

    pub fn union(&self, other: &IntervalSet) -> IntervalSet {
        IntervalSet::from_intervals(self.parts.iter().chain(&other.parts).cloned().collect())
    }

    pub fn intersect(&self, other: &IntervalSet) -> IntervalSet {
        let mut out = Vec::new();
        let (mut i, mut j) = (0, 0);
        while i < self.parts.len() && j < other.parts.len() {
            let (a, b) = (&self.parts[i], &other.parts[j]);
            let c = a.intersect(b);
            if !c.is_empty() {
                out.push(c);
            }
            let a_first = match a.hi.cmp(&b.hi) {
                Ordering::Less => true,
                Ordering::Greater => false,
                Ordering::Equal => !a.hi_closed || b.hi_closed,
            };
            if a_first {
                i += 1;
            } else {
                j += 1;
            }
        }
        IntervalSet::from_intervals(out)
    }

    pub fn intersect_interval(&self, other: &Interval) -> IntervalSet {
        let parts = self.candidates(other).iter().map(|p| p.intersect(other)).filter(|p| !p.is_empty()).collect();
        IntervalSet { parts }
    }

    /// Whether the set and `other` share a point.
    pub fn meets(&self, other: &Interval) -> bool {
        self.candidates(other).iter().any(|p| !p.intersect(other).is_empty())
    }

    fn candidates(&self, other: &Interval) -> &[Interval] {
        let start = self.parts.partition_point(|p| p.hi < other.lo);
        let end = self.parts.partition_point(|p| p.lo <= other.hi);
        &self.parts[start..end.max(start)]
    }

    /// Complement relative to `within`.
    pub fn complement_in(&self, within: &Interval) -> IntervalSet {
        let mut out = Vec::new();
        let mut lo = within.lo.clone();
        let mut lo_closed = within.lo_closed;
        for p in &self.parts {
            out.push(Interval::new(lo.clone(), p.lo.clone(), lo_closed, !p.lo_closed));
            lo = p.hi.clone();
            lo_closed = !p.hi_closed;
        }
        out.push(Interval::new(lo, within.hi.clone(), lo_closed, within.hi_closed));
        IntervalSet::from_intervals(out.into_iter().map(|p| p.intersect(within)).collect())
    }

    pub fn difference(&self, other: &IntervalSet) -> IntervalSet {
        let Some(hull) = self.hull() else {
            return IntervalSet::empty();
        };
        self.intersect(&other.complement_in(&hull))
    }

    pub fn is_subset_of(&self, other: &IntervalSet) -> bool {
        self.difference(other).is_empty()
    }

    /// Smallest closed-or-open interval containing the set.
    pub fn hull(&self) -> Option<Interval> {
        let first = self.parts.first()?;
        let last = self.parts.last()?;
        Some(Interval::new(first.lo.clone(), last.hi.clone(), first.lo_closed, last.hi_closed))
    }

    pub fn affine_preimage(&self, slope: &Rational, intercept: &Rational) -> IntervalSet {
        IntervalSet::from_intervals(
            self.parts.iter().map(|p| p.affine_preimage(slope, intercept)).collect(),
        )
    }

    pub fn affine_image(&self, slope: &Rational, intercept: &Rational) -> IntervalSet {
        IntervalSet::from_intervals(self.parts.iter().map(|p| p.affine_image(slope, intercept)).collect())
    }

    /// Component containing `x`, if any.
    pub fn component_containing(&self, x: &Rational) -> Option<&Interval> {
        self.parts.iter().find(|p| p.contains(x))
    }
}

impl fmt::Display for IntervalSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.parts.is_empty() {
            return write!(f, "∅");
        }
        for (k, p) in self.parts.iter().enumerate() {
            if k > 0 {
                write!(f, " ∪ ")?;
            }
            write!(f, "{p}")?;
        }
        Ok(())
    }
}

/// Maximum number of intervals covering a single point (closed intervals,
/// shared endpoints count). Computed by an endpoint sweep.
pub fn intersection_multiplicity(intervals: &[Interval]) -> usize {
    // Openings sort before closings at the same coordinate so touching
    // closed intervals are counted together.
    let mut events: Vec<(Rational, i8)> = Vec::with_capacity(2 * intervals.len());
    for i in intervals.iter().filter(|i| !i.is_empty()) {
        events.push((i.lo.clone(), 0));
        events.push((i.hi.clone(), 1));
    }
    events.sort();
    let (mut cur, mut best) = (0usize, 0usize);
    for (_, kind) in events {
        if kind == 0 {
            cur += 1;
            best = best.max(cur);
        } else {
            cur -= 1;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    fn c(a: i64, b: i64, p: i64, q: i64) -> Interval {
        Interval::closed(rat(a, b), rat(p, q))
    }

    #[test]
    fn touching_closed_components_merge() {
        let s = IntervalSet::from_intervals(vec![c(0, 1, 1, 2), c(1, 2, 1, 1)]);
        assert_eq!(s.components().len(), 1);
        let t = IntervalSet::from_intervals(vec![
            Interval::open(rat(0, 1), rat(1, 2)),
            Interval::open(rat(1, 2), rat(1, 1)),
        ]);
        assert_eq!(t.components().len(), 2);
    }

    #[test]
    fn complement_flips_flags() {
        let u = IntervalSet::from_interval(Interval::open(rat(2, 5), rat(3, 5)));
        let rest = u.complement_in(&c(0, 1, 1, 1));
        assert_eq!(rest.components(), &[c(0, 1, 2, 5), c(3, 5, 1, 1)]);
        assert_eq!(rest.length(), rat(4, 5));
        assert!(rest.contains(&rat(2, 5)));
        assert!(!rest.contains(&rat(1, 2)));
    }

    #[test]
    fn difference_and_subset() {
        let a = IntervalSet::from_interval(c(0, 1, 1, 1));
        let b = IntervalSet::from_interval(Interval::open(rat(1, 4), rat(1, 2)));
        let d = a.difference(&b);
        assert_eq!(d.components(), &[c(0, 1, 1, 4), c(1, 2, 1, 1)]);
        assert!(d.is_subset_of(&a));
        assert!(!a.is_subset_of(&d));
    }

    #[test]
    fn decreasing_preimage_swaps_flags() {
        let i = Interval::new(rat(0, 1), rat(1, 2), true, false);
        let p = i.affine_preimage(&rat(-2, 1), &rat(2, 1));
        assert_eq!(p, Interval::new(rat(3, 4), rat(1, 1), false, true));
    }

    #[test]
    fn multiplicity_examples() {
        assert_eq!(intersection_multiplicity(&[c(0, 1, 1, 2), c(1, 4, 3, 4), c(3, 5, 9, 10)]), 2);
        assert_eq!(intersection_multiplicity(&[c(0, 1, 1, 2)]), 1);
        assert_eq!(intersection_multiplicity(&vec![c(0, 1, 1, 2); 5]), 5);
        assert_eq!(intersection_multiplicity(&[c(0, 1, 1, 2), c(1, 2, 1, 1)]), 2);
        assert_eq!(intersection_multiplicity(&[]), 0);
    }
}
