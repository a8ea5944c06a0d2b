//! Piecewise monotone interval maps.
//!
//! A [`PiecewiseMap`] is a continuous map of a closed interval `[a, b]` into
//! itself, monotone on each of finitely many pieces, with derivative bounded
//! away from zero. Turning points are the interior breakpoints where the
//! orientation flips; the remaining interior breakpoints are points where only
//! `|Df|` may jump.

mod branch;
mod classify;
mod parse;
mod words;

use std::cmp::Ordering;

use num_traits::{One, Signed, Zero};

pub use branch::{Branch, QuadraticBranch, SmoothBranch};
pub use classify::{classify, ClassReport, LogQuantity};
pub use parse::{parse_map, write_map};
pub use words::{
    compose_branch, identity_branch, itinerary, monotone_branches, refine, BranchWord, MonotoneBranch, DEFAULT_WORD_BUDGET,
};

use crate::error::{Error, Result};
use crate::interval::{Interval, IntervalSet};
use crate::scalar::{fmt_rational, rat, to_f64, Rational, Scalar, DEFAULT_FLOAT_TOL};

/// Which one-sided limit a derivative refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn flip(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }

    fn name(self) -> &'static str {
        match self {
            Side::Left => "left",
            Side::Right => "right",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ArithmeticMode {
    Exact,
    Float { tol: f64 },
}

#[derive(Clone, Debug)]
pub struct PiecewiseMap {
    /// `b_0 < b_1 < … < b_L`, domain ends included.
    edges: Vec<Rational>,
    branches: Vec<Branch>,
    /// Indices into `edges` of the turning points.
    turning: Vec<usize>,
    mode: ArithmeticMode,
}

impl PiecewiseMap {
    /// Builds and validates a map on `[lo, hi]` with the given interior
    /// breakpoints and one branch per piece, left to right.
    pub fn new(lo: Rational, hi: Rational, interior: Vec<Rational>, branches: Vec<Branch>) -> Result<Self> {
        let mut edges = Vec::with_capacity(interior.len() + 2);
        edges.push(lo);
        edges.extend(interior);
        edges.push(hi);
        if edges.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidMap("breakpoints must be strictly increasing inside the domain".into()));
        }
        if branches.len() != edges.len() - 1 {
            return Err(Error::InvalidMap(format!(
                "{} pieces need {} branches, got {}",
                edges.len() - 1,
                edges.len() - 1,
                branches.len()
            )));
        }
        let mode = if branches.iter().all(Branch::is_affine) {
            ArithmeticMode::Exact
        } else {
            ArithmeticMode::Float { tol: 1e-9 }
        };
        let mut map = PiecewiseMap { edges, branches, turning: Vec::new(), mode };
        map.validate()?;
        map.turning = (1..map.edges.len() - 1)
            .filter(|&k| map.orientation(k - 1) != map.orientation(k))
            .collect();
        Ok(map)
    }

    /// Continuous piecewise-affine interpolation of `(x_i, y_i)` nodes.
    pub fn from_nodes(nodes: &[(Rational, Rational)]) -> Result<Self> {
        if nodes.len() < 2 {
            return Err(Error::InvalidMap("need at least two nodes".into()));
        }
        let mut branches = Vec::with_capacity(nodes.len() - 1);
        for w in nodes.windows(2) {
            let ((x0, y0), (x1, y1)) = (&w[0], &w[1]);
            if x1 <= x0 {
                return Err(Error::InvalidMap("node abscissae must increase".into()));
            }
            let slope = (y1 - y0) / (x1 - x0);
            let intercept = y0 - &slope * x0;
            branches.push(Branch::affine(slope, intercept));
        }
        let interior = nodes[1..nodes.len() - 1].iter().map(|(x, _)| x.clone()).collect();
        PiecewiseMap::new(nodes[0].0.clone(), nodes[nodes.len() - 1].0.clone(), interior, branches)
    }

    /// The tent map `x ↦ s·min(x, 1 - x)` on `[0, 1]`, `0 < s <= 2`.
    pub fn tent(slope: Rational) -> Result<Self> {
        let half = rat(1, 2);
        let peak = &slope * &half;
        PiecewiseMap::from_nodes(&[(rat(0, 1), rat(0, 1)), (half, peak), (rat(1, 1), rat(0, 1))])
    }

    fn validate(&self) -> Result<()> {
        let lo = self.lo().clone();
        let hi = self.hi().clone();
        for k in 1..self.edges.len() - 1 {
            let x = &self.edges[k];
            let (left, right) = (&self.branches[k - 1], &self.branches[k]);
            match (left.as_affine(), right.as_affine()) {
                (Some((s0, t0)), Some((s1, t1))) => {
                    let (a, b) = (s0 * x + t0, s1 * x + t1);
                    if a != b {
                        return Err(Error::Continuity {
                            at: fmt_rational(x),
                            left: fmt_rational(&a),
                            right: fmt_rational(&b),
                        });
                    }
                }
                _ => {
                    let xf = to_f64(x);
                    let (a, b) = (left.eval_f64(xf), right.eval_f64(xf));
                    if (a - b).abs() > 1e-9 {
                        return Err(Error::Continuity { at: fmt_rational(x), left: a.to_string(), right: b.to_string() });
                    }
                }
            }
        }
        for (i, b) in self.branches.iter().enumerate() {
            let (l, r) = (&self.edges[i], &self.edges[i + 1]);
            match b {
                Branch::Affine { slope, intercept } => {
                    if slope.is_zero() {
                        return Err(Error::ZeroSlope(i));
                    }
                    for v in [slope * l + intercept, slope * r + intercept] {
                        if v < lo || v > hi {
                            return Err(Error::ImageEscapes { branch: i, value: fmt_rational(&v) });
                        }
                    }
                }
                Branch::Smooth(s) => self.validate_smooth(i, s.as_ref())?,
            }
        }
        Ok(())
    }

    fn validate_smooth(&self, i: usize, s: &dyn SmoothBranch) -> Result<()> {
        const SAMPLES: usize = 64;
        let (l, r) = (to_f64(&self.edges[i]), to_f64(&self.edges[i + 1]));
        let (lower, upper) = s.deriv_bounds();
        if !(lower > 0.0 && lower <= upper) {
            return Err(Error::InvalidMap(format!("branch {i}: derivative bounds must satisfy 0 < lower <= upper")));
        }
        let (lo, hi) = (to_f64(self.lo()), to_f64(self.hi()));
        let sign = s.deriv(l).signum();
        for k in 0..=SAMPLES {
            let x = l + (r - l) * k as f64 / SAMPLES as f64;
            let d = s.deriv(x);
            if d.signum() != sign || d.abs() < lower * (1.0 - 1e-12) || d.abs() > upper * (1.0 + 1e-12) {
                return Err(Error::InvalidMap(format!("branch {i}: |Df({x})| = {} violates supplied bounds", d.abs())));
            }
            let v = s.eval(x);
            if v < lo - 1e-12 || v > hi + 1e-12 {
                return Err(Error::ImageEscapes { branch: i, value: v.to_string() });
            }
        }
        Ok(())
    }

    pub fn lo(&self) -> &Rational {
        &self.edges[0]
    }

    pub fn hi(&self) -> &Rational {
        &self.edges[self.edges.len() - 1]
    }

    pub fn domain(&self) -> Interval {
        Interval::closed(self.lo().clone(), self.hi().clone())
    }

    /// All breakpoints including both domain ends.
    pub fn edges(&self) -> &[Rational] {
        &self.edges
    }

    pub fn interior_breakpoints(&self) -> &[Rational] {
        &self.edges[1..self.edges.len() - 1]
    }

    pub fn branches(&self) -> &[Branch] {
        &self.branches
    }

    pub fn branch_count(&self) -> usize {
        self.branches.len()
    }

    pub fn branch_domain(&self, i: usize) -> Interval {
        Interval::closed(self.edges[i].clone(), self.edges[i + 1].clone())
    }

    pub fn turning_points(&self) -> Vec<Rational> {
        self.turning.iter().map(|&k| self.edges[k].clone()).collect()
    }

    pub fn is_turning_point(&self, c: &Rational) -> bool {
        self.turning_index(c).is_some()
    }

    fn turning_index(&self, c: &Rational) -> Option<usize> {
        self.turning.iter().copied().find(|&k| &self.edges[k] == c)
    }

    pub fn mode(&self) -> ArithmeticMode {
        self.mode
    }

    pub fn is_affine(&self) -> bool {
        self.mode == ArithmeticMode::Exact
    }

    pub fn require_affine(&self) -> Result<()> {
        if self.is_affine() {
            Ok(())
        } else {
            Err(Error::RequiresAffine)
        }
    }

    /// `(slope, intercept)` of branch `i`, affine maps only.
    pub fn affine(&self, i: usize) -> Result<(&Rational, &Rational)> {
        self.branches[i].as_affine().ok_or(Error::RequiresAffine)
    }

    /// +1 for an increasing branch, -1 for a decreasing one.
    pub fn orientation(&self, i: usize) -> i8 {
        let d = match &self.branches[i] {
            Branch::Affine { slope, .. } => to_f64(slope),
            Branch::Smooth(s) => s.deriv(to_f64(&self.edges[i])),
        };
        if d > 0.0 {
            1
        } else {
            -1
        }
    }

    pub fn in_domain(&self, x: &Rational) -> bool {
        x >= self.lo() && x <= self.hi()
    }

    /// Index of the leftmost branch whose closed piece contains `x`.
    pub fn branch_at(&self, x: &Rational) -> Result<usize> {
        if !self.in_domain(x) {
            return Err(Error::outside(x));
        }
        let k = self.edges[1..].partition_point(|e| e < x);
        Ok(k.min(self.branch_count() - 1))
    }

    /// Branch governing the one-sided limit at `x`.
    pub fn branch_on_side(&self, x: &Rational, side: Side) -> Result<usize> {
        if !self.in_domain(x) {
            return Err(Error::outside(x));
        }
        match side {
            Side::Left => {
                if x == self.lo() {
                    return Err(Error::InadmissibleSide { side: side.name(), at: fmt_rational(x) });
                }
                Ok(self.edges[1..].partition_point(|e| e < x))
            }
            Side::Right => {
                if x == self.hi() {
                    return Err(Error::InadmissibleSide { side: side.name(), at: fmt_rational(x) });
                }
                Ok(self.edges[1..].partition_point(|e| e <= x))
            }
        }
    }

    pub fn eval(&self, x: &Scalar) -> Result<Scalar> {
        match x {
            Scalar::Exact(q) if self.is_affine() => self.eval_exact(q).map(Scalar::Exact),
            _ => {
                let v = x.to_f64();
                let (lo, hi) = (to_f64(self.lo()), to_f64(self.hi()));
                if v < lo - DEFAULT_FLOAT_TOL || v > hi + DEFAULT_FLOAT_TOL {
                    return Err(Error::OutsideDomain(v.to_string()));
                }
                Ok(Scalar::Float(self.eval_f64(v)))
            }
        }
    }

    pub fn eval_exact(&self, x: &Rational) -> Result<Rational> {
        let i = self.branch_at(x)?;
        let (s, t) = self.affine(i)?;
        Ok(s * x + t)
    }

    /// Float evaluation, clamped into the domain. Used by long float orbits.
    pub fn eval_f64(&self, x: f64) -> f64 {
        let i = self.branch_at_f64(x);
        let (lo, hi) = (to_f64(self.lo()), to_f64(self.hi()));
        self.branches[i].eval_f64(x).clamp(lo, hi)
    }

    pub fn deriv_f64(&self, x: f64) -> f64 {
        self.branches[self.branch_at_f64(x)].deriv_f64(x)
    }

    pub(crate) fn branch_at_f64(&self, x: f64) -> usize {
        let k = self.edges[1..].partition_point(|e| to_f64(e) < x);
        k.min(self.branch_count() - 1)
    }

    /// One-sided derivative at `x`.
    pub fn deriv(&self, x: &Rational, side: Side) -> Result<Scalar> {
        let i = self.branch_on_side(x, side)?;
        Ok(match &self.branches[i] {
            Branch::Affine { slope, .. } => Scalar::Exact(slope.clone()),
            Branch::Smooth(s) => Scalar::Float(s.deriv(to_f64(x))),
        })
    }

    pub fn deriv_exact(&self, x: &Rational, side: Side) -> Result<Rational> {
        let i = self.branch_on_side(x, side)?;
        Ok(self.affine(i)?.0.clone())
    }

    /// Maximal closed neighborhood of the turning point `c` on which the
    /// involution `τ` (pairing points of equal image across `c`) exists.
    pub fn tau_domain(&self, c: &Rational) -> Result<Interval> {
        let k = self.turning_index(c).ok_or_else(|| Error::NotTurningPoint(fmt_rational(c)))?;
        let (sl, tl) = self.affine(k - 1)?;
        let (sr, tr) = self.affine(k)?;
        let fc = sl * c + tl;
        let far_left = sl * &self.edges[k - 1] + tl;
        let far_right = sr * &self.edges[k + 1] + tr;
        // Both branch images share the endpoint f(c); the common range runs
        // from f(c) to whichever far value is closer to it.
        let reach = if (&far_left - &fc).abs() <= (&far_right - &fc).abs() { far_left } else { far_right };
        let x_left = (&reach - tl) / sl;
        let x_right = (&reach - tr) / sr;
        Ok(Interval::closed(x_left, x_right))
    }

    /// `τ(y)` for the turning point `c`: the point on the other side of `c`
    /// with the same image.
    pub fn tau(&self, c: &Rational, y: &Rational) -> Result<Rational> {
        let dom = self.tau_domain(c)?;
        if !dom.contains(y) {
            return Err(Error::TauUndefined { c: fmt_rational(c), y: fmt_rational(y) });
        }
        let k = self.turning_index(c).expect("checked by tau_domain");
        let v = self.eval_exact(y)?;
        let other = match y.cmp(c) {
            Ordering::Equal => return Ok(c.clone()),
            Ordering::Less => k,
            Ordering::Greater => k - 1,
        };
        let (s, t) = self.affine(other)?;
        Ok((v - t) / s)
    }

    /// Exact image of an interval (the map is continuous, so it is an interval).
    pub fn image_interval(&self, j: &Interval) -> Result<Interval> {
        self.require_affine()?;
        let mut pieces = Vec::new();
        for i in 0..self.branch_count() {
            let part = j.intersect(&self.branch_domain(i));
            if part.is_empty() {
                continue;
            }
            let (s, t) = self.affine(i)?;
            pieces.push(part.affine_image(s, t));
        }
        let set = IntervalSet::from_intervals(pieces);
        Ok(set.hull().unwrap_or_else(|| Interval::open(Rational::one(), Rational::zero())))
    }

    /// Exact preimage `f^{-1}(set)`.
    pub fn preimage_set(&self, set: &IntervalSet) -> Result<IntervalSet> {
        self.require_affine()?;
        let mut parts = Vec::new();
        for i in 0..self.branch_count() {
            let (s, t) = self.affine(i)?;
            let dom = self.branch_domain(i);
            for p in set.affine_preimage(s, t).components() {
                let q = p.intersect(&dom);
                if !q.is_empty() {
                    parts.push(q);
                }
            }
        }
        Ok(IntervalSet::from_intervals(parts))
    }

    /// `min |Df|` over the domain (exact, affine maps).
    pub fn min_abs_slope(&self) -> Result<Rational> {
        let mut best: Option<Rational> = None;
        for i in 0..self.branch_count() {
            let s = self.affine(i)?.0.abs();
            best = Some(match best {
                Some(b) if b <= s => b,
                _ => s,
            });
        }
        Ok(best.expect("at least one branch"))
    }
}
