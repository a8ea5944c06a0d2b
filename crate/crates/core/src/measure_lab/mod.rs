//! Symmetric neighborhoods of turning points and what returns to them.
//!
//! For a turning point `c` and `x` near it, `U_x` is the open interval between
//! `x` and `τ(x)`. This module decides (as far as a finite computation can)
//! whether orbits avoid such intervals, builds first-return structures and
//! the sets `V_k`, approximates ω-limit sets and estimates the invariant
//! density by Ulam's method.

mod omega;
mod returns;
mod ulam;
mod vk;

use std::collections::BTreeSet;

pub use omega::{density_gap_check, omega_approx, GapFailure, GapOutcome, OmegaApprox, OmegaLevel};
pub use returns::{first_return, psi, ReturnComponent, ReturnStructure};
pub use ulam::{transfer_matrix, ulam_acip, UlamDensity, UlamOptions};
pub use vk::{vk_components, EndpointTag, VkComponent};

use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::map_model::PiecewiseMap;
use crate::scalar::{fmt_rational, Rational};

#[derive(Clone, Debug, PartialEq)]
pub struct SymmetricInterval {
    pub c: Rational,
    pub x: Rational,
    /// `(min(x, τ(x)), max(x, τ(x)))`; empty when `x = c`.
    pub u: Interval,
}

impl SymmetricInterval {
    pub fn is_degenerate(&self) -> bool {
        self.u.is_empty()
    }

    pub fn length(&self) -> Rational {
        self.u.length()
    }

    /// `τ(x)`.
    pub fn partner(&self) -> &Rational {
        if self.x == self.u.lo {
            &self.u.hi
        } else {
            &self.u.lo
        }
    }
}

pub fn symmetric_interval(f: &PiecewiseMap, c: &Rational, x: &Rational) -> Result<SymmetricInterval> {
    f.require_affine()?;
    let t = f.tau(c, x)?;
    let u = if x <= &t { Interval::open(x.clone(), t) } else { Interval::open(t, x.clone()) };
    Ok(SymmetricInterval { c: c.clone(), x: x.clone(), u })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Niceness {
    /// The orbit of `x` is eventually periodic and the whole orbit avoids `U_x`.
    Nice { preperiod: usize, period: usize },
    /// `f^k(x) ∈ U_x` for this first `k`.
    NotNice(usize),
    UnknownAtHorizon(usize),
}

/// Whether the orbit of the base point avoids `U_x`, iterating exactly for at
/// most `horizon` steps.
pub fn nice_test(f: &PiecewiseMap, base: &SymmetricInterval, horizon: usize) -> Result<Niceness> {
    let mut seen: Vec<Rational> = vec![base.x.clone()];
    let mut index: BTreeSet<Rational> = BTreeSet::from([base.x.clone()]);
    let mut y = base.x.clone();
    for k in 1..=horizon {
        y = f.eval_exact(&y)?;
        if base.u.contains(&y) {
            return Ok(Niceness::NotNice(k));
        }
        if index.contains(&y) {
            let start = seen.iter().position(|s| s == &y).expect("indexed");
            return Ok(Niceness::Nice { preperiod: start, period: k - start });
        }
        index.insert(y.clone());
        seen.push(y.clone());
    }
    Ok(Niceness::UnknownAtHorizon(horizon))
}

/// Times `n(0) < n(1) < …` of closest returns of the orbit of `x` to `c`:
/// `n(0)` is the first entry into the domain of `τ`, and `f^{n(i+1)}(x)` is
/// the first later point inside the symmetric interval of `f^{n(i)}(x)`.
///
/// Stops after `count` times, when the current interval is empty, or at the
/// horizon.
pub fn closest_returns(f: &PiecewiseMap, x: &Rational, c: &Rational, count: usize, horizon: usize) -> Result<Vec<usize>> {
    let dom = f.tau_domain(c)?;
    let mut y = x.clone();
    let mut t = 0;
    while !dom.contains(&y) {
        if t == horizon {
            return Err(Error::Precondition(format!(
                "orbit of {} does not enter the neighborhood of {} within {horizon} steps",
                fmt_rational(x),
                fmt_rational(c)
            )));
        }
        y = f.eval_exact(&y)?;
        t += 1;
    }
    let mut times = vec![t];
    let mut current = symmetric_interval(f, c, &y)?;
    while times.len() < count && !current.is_degenerate() && t < horizon {
        y = f.eval_exact(&y)?;
        t += 1;
        if current.u.contains(&y) {
            times.push(t);
            current = symmetric_interval(f, c, &y)?;
        }
    }
    Ok(times)
}
