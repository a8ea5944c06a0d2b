use num_traits::{One, Signed};
use rayon::prelude::*;

use super::basins::{immediate_basins_with_budget, BasinSet};
use crate::error::{Error, Result};
use crate::interval::IntervalSet;
use crate::map_model::{identity_branch, MonotoneBranch, PiecewiseMap, DEFAULT_WORD_BUDGET};
use crate::orbit_engine::{periodic_orbits_with_budget, Hyperbolicity};
use crate::scalar::{fmt_rational, Rational};

/// `Γ_k(U)`, the points whose first `k + 1` orbit points avoid `U`, for
/// `k = 0..=n`.
#[derive(Clone, Debug, PartialEq)]
pub struct AvoidanceSet {
    pub u: IntervalSet,
    pub n: usize,
    /// `levels[k] = Γ_k(U)`; closed intervals.
    pub levels: Vec<IntervalSet>,
    /// `min |Df^k|` over `Γ_k(U)`, `None` when it is empty. Index `0` is `1`.
    pub min_deriv_per_k: Vec<Option<Rational>>,
}

impl AvoidanceSet {
    pub fn gamma_n(&self) -> &IntervalSet {
        &self.levels[self.n]
    }
}

pub fn gamma_n(f: &PiecewiseMap, u: &IntervalSet, n: usize) -> Result<AvoidanceSet> {
    gamma_n_with_budget(f, u, n, DEFAULT_WORD_BUDGET)
}

/// Computes `Γ_{k+1} = (I \ U) ∩ f^{-1}(Γ_k)` exactly. The minima come from
/// the branches of `f^k` meeting `Γ_k`; only those are refined, since a
/// branch of `f^{k+1}` meeting `Γ_{k+1}` refines one meeting `Γ_k`.
pub fn gamma_n_with_budget(f: &PiecewiseMap, u: &IntervalSet, n: usize, budget: u128) -> Result<AvoidanceSet> {
    f.require_affine()?;
    let domain = f.domain();
    let outside = u.complement_in(&domain);
    let mut levels = vec![outside.clone()];
    for _ in 0..n {
        let prev = levels.last().expect("nonempty");
        levels.push(outside.intersect(&f.preimage_set(prev)?));
    }

    let mut min_deriv_per_k = Vec::with_capacity(n + 1);
    let mut live: Vec<MonotoneBranch> = vec![identity_branch(f)];
    for (k, level) in levels.iter().enumerate() {
        if k > 0 {
            live = live
                .par_iter()
                .flat_map_iter(|b| (0..f.branch_count()).filter_map(move |i| b.extend(f, i)))
                .filter(|b| !b.domain.is_degenerate())
                .collect();
        }
        live.retain(|b| level.meets(&b.domain));
        if live.len() as u128 > budget {
            return Err(Error::BudgetExceeded { words: live.len() as u128, budget });
        }
        min_deriv_per_k.push(live.iter().map(|b| b.slope.abs()).min());
    }
    Ok(AvoidanceSet { u: u.clone(), n, levels, min_deriv_per_k })
}

#[derive(Clone, Debug)]
pub struct ManeOptions {
    /// Periods searched for attractors and for non-hyperbolic orbits.
    pub period_bound: usize,
    pub budget: u128,
}

impl Default for ManeOptions {
    fn default() -> Self {
        ManeOptions { period_bound: 6, budget: DEFAULT_WORD_BUDGET }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ManeReport {
    pub period_bound: usize,
    pub basins: BasinSet,
    /// `U ∪ B_0`.
    pub avoided: IntervalSet,
    /// `minima[n - 1] = min |Df^n|` over `Γ_n(U ∪ B_0)`, for `n = 1..=n_max`.
    pub minima: Vec<Option<Rational>>,
    /// First `n` with `Γ_n(U ∪ B_0)` empty.
    pub empty_from: Option<usize>,
    /// Fitted growth rate and the largest `C` with `min_n >= C·λ^n` for every
    /// computed `n`.
    pub lambda: Option<f64>,
    pub c: Option<f64>,
    pub certified: bool,
}

/// Minimum growth of `|Df^n|` away from `U` and the immediate basins.
///
/// `ln(min_n)` is fitted by least squares over the upper half of the
/// horizon. The certificate is issued when some minimum exceeds `1` and the
/// minima increase strictly over the fitted window.
pub fn mane_growth(f: &PiecewiseMap, u: &IntervalSet, n_max: usize, opts: &ManeOptions) -> Result<ManeReport> {
    f.require_affine()?;
    if n_max == 0 {
        return Err(Error::InvalidArgument("horizon must be at least 1".into()));
    }
    for p in 1..=opts.period_bound {
        for orbit in periodic_orbits_with_budget(f, p, opts.budget)? {
            let outside = orbit.points.iter().all(|x| !u.contains(x));
            if outside && orbit.hyperbolicity == Hyperbolicity::NonHyperbolic {
                return Err(Error::NonHyperbolic { period: p, point: fmt_rational(&orbit.points[0]) });
            }
        }
    }
    let basins = immediate_basins_with_budget(f, opts.period_bound, opts.budget)?;
    let avoided = u.union(&basins.open_union(f));
    let gamma = gamma_n_with_budget(f, &avoided, n_max, opts.budget)?;
    let minima: Vec<Option<Rational>> = gamma.min_deriv_per_k[1..].to_vec();
    let empty_from = (1..=n_max).find(|&n| minima[n - 1].is_none());

    let window: Vec<(usize, &Rational)> = (n_max / 2 + 1..=n_max).filter_map(|n| minima[n - 1].as_ref().map(|m| (n, m))).collect();
    let (lambda, c) = if empty_from.is_some() || window.len() < 2 {
        (None, None)
    } else {
        let pts: Vec<(f64, f64)> = window.iter().map(|(n, m)| (*n as f64, log(m))).collect();
        let slope = least_squares_slope(&pts);
        let c = minima
            .iter()
            .enumerate()
            .map(|(i, m)| log(m.as_ref().expect("no empty level")) - slope * (i + 1) as f64)
            .fold(f64::INFINITY, f64::min)
            .exp();
        (Some(slope.exp()), Some(c))
    };
    let one = Rational::one();
    let exceeds = minima.iter().flatten().any(|m| m > &one);
    let increasing = window.len() >= 2 && window.windows(2).all(|w| w[1].1 > w[0].1);
    let certified = empty_from.is_none() && exceeds && increasing;
    Ok(ManeReport { period_bound: opts.period_bound, basins, avoided, minima, empty_from, lambda, c, certified })
}

fn log(q: &Rational) -> f64 {
    // Products of slopes can leave the f64 range; split numerator and denominator.
    let num = q.numer().to_string();
    let den = q.denom().to_string();
    log_decimal(&num) - log_decimal(&den)
}

fn log_decimal(digits: &str) -> f64 {
    let lead: String = digits.chars().take(17).collect();
    let mantissa: f64 = lead.parse().expect("decimal digits");
    mantissa.ln() + ((digits.len() - lead.len()) as f64) * std::f64::consts::LN_10
}

fn least_squares_slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    sxy / sxx
}
