//! Expansion along periodic orbits and everywhere.
//!
//! * [`kn_table`]: for each period `n`, the smallest `|Df^n|` over orbits of
//!   minimal period `n`.
//! * [`expansion_n`]: the first `N` with `|Df^N| > 1` on the whole interval.
//! * [`gamma_n`] / [`mane_growth`]: expansion on points whose orbits avoid a
//!   neighborhood of the turning points and of the periodic attractors.
//! * [`immediate_basins`]: the immediate basins of the periodic attractors.
//! * [`hyperbolic_certificate`] turns "each point eventually expands by `λ`"
//!   into uniform `C·λ'^n` growth.

mod basins;
mod gamma;

use num_traits::{One, Signed};
use rayon::prelude::*;

pub use basins::{immediate_basins, Basin, BasinSet};
pub use gamma::{gamma_n, mane_growth, AvoidanceSet, ManeOptions, ManeReport};

use crate::error::{Error, Result};
use crate::map_model::{identity_branch, refine, ArithmeticMode, Branch, BranchWord, PiecewiseMap, DEFAULT_WORD_BUDGET};
use crate::orbit_engine::{orbit_derivative, periodic_orbits_with_budget, PeriodicOrbit};
use crate::scalar::{fmt_rational, to_f64, Rational};

#[derive(Clone, Debug, PartialEq)]
pub struct KnRow {
    pub n: usize,
    /// `min |Df^n(p)|` over orbits of minimal period `n`; `None` when there
    /// are no such orbits.
    pub min: Option<Rational>,
    pub orbit_count: usize,
    pub attaining: Option<PeriodicOrbit>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct KnTable {
    pub rows: Vec<KnRow>,
}

impl KnTable {
    pub fn row(&self, n: usize) -> Option<&KnRow> {
        self.rows.iter().find(|r| r.n == n)
    }
}

pub fn kn_table(f: &PiecewiseMap, n_max: usize) -> Result<KnTable> {
    kn_table_with_budget(f, n_max, DEFAULT_WORD_BUDGET)
}

pub fn kn_table_with_budget(f: &PiecewiseMap, n_max: usize, budget: u128) -> Result<KnTable> {
    let rows = (1..=n_max)
        .into_par_iter()
        .map(|n| {
            let orbits = periodic_orbits_with_budget(f, n, budget)?;
            let attaining = orbits.iter().min_by(|a, b| a.magnitude().cmp(&b.magnitude())).cloned();
            Ok(KnRow { n, min: attaining.as_ref().map(PeriodicOrbit::magnitude), orbit_count: orbits.len(), attaining })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(KnTable { rows })
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExpansionCertificate {
    pub n: usize,
    /// `min |Df^N|` over the interval: the smallest composed `|slope|` among
    /// branches of `f^N`.
    pub min_expansion: Rational,
    pub worst_word: BranchWord,
}

#[derive(Clone, Debug, PartialEq)]
pub enum ExpansionOutcome {
    Certified(ExpansionCertificate),
    /// No `N <= n_limit` works; carries the worst branch at `n_limit`.
    Refused { n_limit: usize, min_expansion: Rational, worst_word: BranchWord },
}

impl ExpansionOutcome {
    pub fn certificate(&self) -> Option<&ExpansionCertificate> {
        match self {
            ExpansionOutcome::Certified(c) => Some(c),
            ExpansionOutcome::Refused { .. } => None,
        }
    }
}

/// Smallest `N <= n_limit` with `|Df^N| > 1` everywhere.
pub fn expansion_n(f: &PiecewiseMap, n_limit: usize) -> Result<ExpansionOutcome> {
    expansion_n_with_budget(f, n_limit, DEFAULT_WORD_BUDGET)
}

pub fn expansion_n_with_budget(f: &PiecewiseMap, n_limit: usize, budget: u128) -> Result<ExpansionOutcome> {
    if n_limit == 0 {
        return Err(Error::InvalidArgument("n_limit must be at least 1".into()));
    }
    if !f.is_affine() {
        return expansion_n_smooth(f, n_limit, budget);
    }
    let mut level = vec![identity_branch(f)];
    let mut worst = None;
    for n in 1..=n_limit {
        let words = level.len() as u128 * f.branch_count() as u128;
        if words > budget {
            return Err(Error::BudgetExceeded { words, budget });
        }
        level = refine(f, &level);
        let w = level.iter().min_by(|a, b| a.slope.abs().cmp(&b.slope.abs())).expect("branches cover the domain");
        let min_expansion = w.slope.abs();
        if min_expansion > Rational::one() {
            return Ok(ExpansionOutcome::Certified(ExpansionCertificate { n, min_expansion, worst_word: w.word.clone() }));
        }
        worst = Some((min_expansion, w.word.clone()));
    }
    let (min_expansion, worst_word) = worst.expect("n_limit >= 1");
    Ok(ExpansionOutcome::Refused { n_limit, min_expansion, worst_word })
}

/// Branch-wise lower bounds for maps with smooth branches. Word images are
/// tracked in floating point, widened by the map tolerance, so admissibility
/// errs towards keeping words and the bound is conservative.
fn expansion_n_smooth(f: &PiecewiseMap, n_limit: usize, budget: u128) -> Result<ExpansionOutcome> {
    let tol = match f.mode() {
        ArithmeticMode::Float { tol } => tol,
        ArithmeticMode::Exact => 0.0,
    };
    let lower: Vec<f64> = f
        .branches()
        .iter()
        .map(|b| match b {
            Branch::Affine { slope, .. } => to_f64(slope).abs(),
            Branch::Smooth(s) => s.deriv_bounds().0,
        })
        .collect();
    let doms: Vec<(f64, f64)> = (0..f.branch_count())
        .map(|i| {
            let d = f.branch_domain(i);
            (to_f64(&d.lo), to_f64(&d.hi))
        })
        .collect();
    // (word, image lo, image hi, product of lower bounds)
    let mut level: Vec<(Vec<usize>, f64, f64, f64)> = vec![(Vec::new(), to_f64(f.lo()), to_f64(f.hi()), 1.0)];
    let mut worst = None;
    for n in 1..=n_limit {
        let words = level.len() as u128 * f.branch_count() as u128;
        if words > budget {
            return Err(Error::BudgetExceeded { words, budget });
        }
        let mut next = Vec::new();
        for (word, lo, hi, prod) in &level {
            for (i, &(dlo, dhi)) in doms.iter().enumerate() {
                let a = lo.max(dlo);
                let b = hi.min(dhi);
                if b - a <= tol {
                    continue;
                }
                let (ya, yb) = (f.branches()[i].eval_f64(a), f.branches()[i].eval_f64(b));
                let mut w = word.clone();
                w.push(i);
                next.push((w, ya.min(yb) - tol, ya.max(yb) + tol, prod * lower[i]));
            }
        }
        level = next;
        let (w, _, _, p) = level.iter().min_by(|a, b| a.3.total_cmp(&b.3)).expect("branches cover the domain");
        let min_expansion = Rational::from_float(*p).ok_or_else(|| Error::Number(format!("{p}")))?;
        if min_expansion > Rational::one() {
            return Ok(ExpansionOutcome::Certified(ExpansionCertificate { n, min_expansion, worst_word: BranchWord(w.clone()) }));
        }
        worst = Some((min_expansion, BranchWord(w.clone())));
    }
    let (min_expansion, worst_word) = worst.expect("n_limit >= 1");
    Ok(ExpansionOutcome::Refused { n_limit, min_expansion, worst_word })
}

/// Uniform hyperbolicity constants from pointwise expansion.
#[derive(Clone, Debug, PartialEq)]
pub struct HyperbolicCertificate {
    /// `N = max n_x`.
    pub n: usize,
    pub lambda: Rational,
    /// `λ' = λ^{1/N}`.
    pub lambda_prime: f64,
    /// `C` with `|Df^n(x)| >= C·λ'^n`.
    pub c: Rational,
}

impl HyperbolicCertificate {
    /// Exact check of `|Df^n| >= C·λ^{n/N}`, i.e. `(|Df^n|/C)^N >= λ^n`.
    pub fn holds(&self, magnitude: &Rational, n: usize) -> bool {
        let lhs = num_traits::pow(magnitude / &self.c, self.n);
        let rhs = num_traits::pow(self.lambda.clone(), n);
        lhs >= rhs
    }
}

/// Converts samples `(x, n_x)` with `|Df^{n_x}(x)| >= λ > 1` into constants
/// `C, λ'` with `|Df^n(x)| >= C·λ'^n`.
///
/// With `N = max n_x` and `m = min |Df|`, chaining blocks of length at most
/// `N` gives `|Df^n| >= λ^{⌊n/N⌋}·m^N >= (m^N/λ)·λ^{n/N}` for `m < 1`. The
/// sharper constant `m^N` is returned instead when it holds on every sample
/// for every `n <= horizon`. For `m >= 1` the constant is `1/λ`.
pub fn hyperbolic_certificate(
    f: &PiecewiseMap,
    samples: &[(Rational, usize)],
    lambda: &Rational,
    m: &Rational,
    horizon: usize,
) -> Result<HyperbolicCertificate> {
    f.require_affine()?;
    if lambda <= &Rational::one() {
        return Err(Error::InvalidArgument("λ must exceed 1".into()));
    }
    if samples.is_empty() {
        return Err(Error::InvalidArgument("no samples".into()));
    }
    let actual_min = f.min_abs_slope()?;
    if m > &actual_min {
        return Err(Error::Precondition(format!(
            "m = {} exceeds min |Df| = {}",
            fmt_rational(m),
            fmt_rational(&actual_min)
        )));
    }
    for (x, nx) in samples {
        let d = orbit_derivative(f, x, *nx)?.magnitude();
        if &d < lambda {
            return Err(Error::Precondition(format!(
                "|Df^{nx}({})| = {} < λ = {}",
                fmt_rational(x),
                fmt_rational(&d),
                fmt_rational(lambda)
            )));
        }
    }
    let n = samples.iter().map(|s| s.1).max().expect("nonempty");
    let lambda_prime = to_f64(lambda).powf(1.0 / n as f64);
    let make = |c: Rational| HyperbolicCertificate { n, lambda: lambda.clone(), lambda_prime, c };
    if m >= &Rational::one() {
        return Ok(make(lambda.recip()));
    }
    let tight = make(num_traits::pow(m.clone(), n));
    let mut verified = true;
    'outer: for (x, _) in samples {
        for k in 1..=horizon {
            if !tight.holds(&orbit_derivative(f, x, k)?.magnitude(), k) {
                verified = false;
                break 'outer;
            }
        }
    }
    if verified {
        Ok(tight)
    } else {
        Ok(make(num_traits::pow(m.clone(), n) / lambda))
    }
}
