//! Orbits, derivative cocycles and exhaustive periodic-orbit enumeration.
//!
//! Periodic points of period dividing `n` are the fixed points of the
//! composed affine branches of `f^n`, so enumerating monotone branches and
//! solving one linear equation per branch finds all of them exactly.
//!
//! Derivatives at breakpoints are one-sided. A one-sided limit is followed
//! along the orbit: approaching `x` from one side, the images approach `f(x)`
//! from the same side when the branch increases and from the other side when
//! it decreases. `|Df^n(x)|` in the liminf sense is the smaller of the two
//! one-sided magnitudes.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::{One, Signed};

use crate::error::{Error, Result};
use crate::map_model::{monotone_branches, BranchWord, PiecewiseMap, Side, DEFAULT_WORD_BUDGET};
use crate::scalar::{fmt_rational, Rational};

/// `x, f(x), …, f^n(x)` with the one-sided derivative pair at each of the
/// first `n` points (`None` where a side leaves the domain).
#[derive(Clone, Debug, PartialEq)]
pub struct OrbitSegment {
    pub points: Vec<Rational>,
    pub derivs: Vec<OneSided>,
}

/// A quantity with a left and a right one-sided value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OneSided {
    pub left: Option<Rational>,
    pub right: Option<Rational>,
}

impl OneSided {
    /// Smallest magnitude among the available sides.
    pub fn magnitude(&self) -> Rational {
        match (&self.left, &self.right) {
            (Some(l), Some(r)) => l.abs().min(r.abs()),
            (Some(v), None) | (None, Some(v)) => v.abs(),
            (None, None) => unreachable!("an interior or endpoint has at least one side"),
        }
    }

    fn sides(&self) -> impl Iterator<Item = &Rational> {
        self.left.iter().chain(self.right.iter())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Hyperbolicity {
    Repelling,
    Attracting,
    NonHyperbolic,
}

impl fmt::Display for Hyperbolicity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Hyperbolicity::Repelling => "repelling",
            Hyperbolicity::Attracting => "attracting",
            Hyperbolicity::NonHyperbolic => "non_hyperbolic",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PeriodicOrbit {
    /// Orbit in dynamical order starting from the smallest point.
    pub points: Vec<Rational>,
    /// One-sided values of `Df^n` at `points[0]`.
    pub multiplier: OneSided,
    pub hyperbolicity: Hyperbolicity,
    /// Lexicographically smallest word of a branch of `f^n` fixing `points[0]`.
    pub word: BranchWord,
    /// Signed one-sided derivatives along the orbit on the side that attains
    /// the liminf; their product is the liminf multiplier.
    pub step_derivs: Vec<Rational>,
}

impl PeriodicOrbit {
    pub fn period(&self) -> usize {
        self.points.len()
    }

    /// `|Df^n|` in the liminf convention.
    pub fn magnitude(&self) -> Rational {
        self.multiplier.magnitude()
    }

    /// Orbit point from which every partial product `|Df^j|`, `j <= n`,
    /// stays at most `c`. See [`minimax_start`].
    pub fn minimax_start(&self, c: &Rational) -> Result<Option<&Rational>> {
        let abs: Vec<Rational> = self.step_derivs.iter().map(Signed::abs).collect();
        Ok(minimax_start(&abs, c)?.map(|r| &self.points[r]))
    }
}

pub fn iterate(f: &PiecewiseMap, x: &Rational, n: usize) -> Result<OrbitSegment> {
    let mut points = Vec::with_capacity(n + 1);
    let mut derivs = Vec::with_capacity(n);
    let mut y = x.clone();
    for _ in 0..n {
        derivs.push(one_sided_deriv(f, &y)?);
        let next = f.eval_exact(&y)?;
        points.push(std::mem::replace(&mut y, next));
    }
    points.push(y);
    Ok(OrbitSegment { points, derivs })
}

fn one_sided_deriv(f: &PiecewiseMap, x: &Rational) -> Result<OneSided> {
    if !f.in_domain(x) {
        return Err(Error::outside(x));
    }
    Ok(OneSided { left: f.deriv_exact(x, Side::Left).ok(), right: f.deriv_exact(x, Side::Right).ok() })
}

/// Signed one-sided derivatives of `f^n` at `x`, starting from `side`.
/// `None` when `side` is not admissible at `x`.
fn side_chain(f: &PiecewiseMap, x: &Rational, n: usize, side: Side) -> Result<Option<Vec<Rational>>> {
    let mut steps = Vec::with_capacity(n);
    let mut y = x.clone();
    let mut side = side;
    for _ in 0..n {
        let d = match f.deriv_exact(&y, side) {
            Ok(d) => d,
            Err(Error::InadmissibleSide { .. }) => return Ok(None),
            Err(e) => return Err(e),
        };
        if d.is_negative() {
            side = side.flip();
        }
        y = f.eval_exact(&y)?;
        steps.push(d);
    }
    Ok(Some(steps))
}

fn product(steps: &[Rational]) -> Rational {
    steps.iter().fold(Rational::one(), |acc, d| acc * d)
}

/// Both one-sided values of `Df^n(x)`.
pub fn orbit_derivative(f: &PiecewiseMap, x: &Rational, n: usize) -> Result<OneSided> {
    f.require_affine()?;
    if !f.in_domain(x) {
        return Err(Error::outside(x));
    }
    let left = side_chain(f, x, n, Side::Left)?.map(|s| product(&s));
    let right = side_chain(f, x, n, Side::Right)?.map(|s| product(&s));
    Ok(OneSided { left, right })
}

/// All solutions of `f^n(x) = x`, each paired with the lexicographically
/// smallest word of a branch of `f^n` fixing it.
pub fn fixed_points_of_iterate(f: &PiecewiseMap, n: usize, budget: u128) -> Result<BTreeMap<Rational, BranchWord>> {
    let mut found = BTreeMap::new();
    for b in monotone_branches(f, n, budget)? {
        if let Some(x) = b.fixed_point()? {
            found.entry(x).or_insert(b.word);
        }
    }
    Ok(found)
}

pub fn periodic_orbits(f: &PiecewiseMap, n: usize) -> Result<Vec<PeriodicOrbit>> {
    periodic_orbits_with_budget(f, n, DEFAULT_WORD_BUDGET)
}

/// The complete set of orbits of minimal period `n`, sorted by word.
pub fn periodic_orbits_with_budget(f: &PiecewiseMap, n: usize, budget: u128) -> Result<Vec<PeriodicOrbit>> {
    if n == 0 {
        return Err(Error::InvalidArgument("period must be at least 1".into()));
    }
    let fixed = fixed_points_of_iterate(f, n, budget)?;
    let mut seen: BTreeSet<Rational> = BTreeSet::new();
    let mut orbits = Vec::new();
    for (x, word) in &fixed {
        if seen.contains(x) {
            continue;
        }
        let seg = iterate(f, x, n)?;
        let period = (1..=n).find(|&d| &seg.points[d] == x).expect("x is fixed by f^n");
        seen.extend(seg.points[..n].iter().cloned());
        if period != n {
            continue;
        }
        // `fixed` iterates in increasing order, so `x` is the orbit minimum.
        orbits.push(build_orbit(f, seg.points[..n].to_vec(), word.clone())?);
    }
    orbits.sort_by(|a, b| a.word.cmp(&b.word));
    Ok(orbits)
}

fn build_orbit(f: &PiecewiseMap, points: Vec<Rational>, word: BranchWord) -> Result<PeriodicOrbit> {
    let n = points.len();
    let left = side_chain(f, &points[0], n, Side::Left)?;
    let right = side_chain(f, &points[0], n, Side::Right)?;
    let multiplier = OneSided { left: left.as_deref().map(product), right: right.as_deref().map(product) };
    let step_derivs = match (left, right) {
        (Some(l), Some(r)) => {
            if product(&r).abs() < product(&l).abs() {
                r
            } else {
                l
            }
        }
        (Some(s), None) | (None, Some(s)) => s,
        (None, None) => unreachable!("a domain point has an admissible side"),
    };
    let hyperbolicity = hyperbolicity_of(&multiplier);
    Ok(PeriodicOrbit { points, multiplier, hyperbolicity, word, step_derivs })
}

fn hyperbolicity_of(m: &OneSided) -> Hyperbolicity {
    let one = Rational::one();
    if m.sides().all(|v| v.abs() > one) {
        Hyperbolicity::Repelling
    } else if m.sides().all(|v| v.abs() < one) {
        Hyperbolicity::Attracting
    } else {
        Hyperbolicity::NonHyperbolic
    }
}

/// Recomputes the one-sided multipliers of `orbit` and classifies it.
pub fn classify_periodic(f: &PiecewiseMap, orbit: &PeriodicOrbit) -> Result<Hyperbolicity> {
    let m = orbit_derivative(f, &orbit.points[0], orbit.period())?;
    Ok(hyperbolicity_of(&m))
}

/// Given cyclic per-step magnitudes `|Df|` along a periodic orbit whose
/// product is at most `c`, returns the first rotation from which every
/// partial product stays at most `c`.
///
/// Such a rotation always exists (start right after the maximum of the
/// prefix products), so `None` only signals inconsistent input.
pub fn minimax_start(steps: &[Rational], c: &Rational) -> Result<Option<usize>> {
    if steps.is_empty() {
        return Err(Error::InvalidArgument("empty orbit".into()));
    }
    let total = product(steps);
    if &total > c {
        return Err(Error::Precondition(format!(
            "|Df^n| = {} exceeds C = {}",
            fmt_rational(&total),
            fmt_rational(c)
        )));
    }
    let n = steps.len();
    Ok((0..n).find(|&r| {
        let mut acc = Rational::one();
        (0..n).all(|j| {
            acc *= &steps[(r + j) % n];
            &acc <= c
        })
    }))
}
