//! Distortion of iterates and the bounds that control it.
//!
//! For an interval `J` the distortion of `f^n` is
//! `sup_{x,y∈J} |Df^n(x)| / |Df^n(y)|`. Three bounds are compared against it:
//! the multiplicity bound `e^{S(K+LM)}`, the summed-length bound
//! `e^{K_lip Σ|f^i(J)|}` and, for information only, the product of the
//! `|Df|` jumps met by the iterates.

use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::interval::Interval;
pub use crate::interval::intersection_multiplicity;
use crate::map_model::{classify, ClassReport, LogQuantity, PiecewiseMap, DEFAULT_WORD_BUDGET};
use crate::scalar::{to_f64, LogValue, Rational, Scalar};

const FLOAT_SAMPLES: usize = 1025;
const FLOAT_SLACK: f64 = 1e-9;

/// `e^{S(K+LM)}` with `K = Var(ln|Df|)`, `L` the number of jumps of `|Df|`
/// and `M` the largest jump of `ln|Df|`. Exact for affine maps.
pub fn bound_multiplicity(report: &ClassReport, s: usize) -> Scalar {
    match (&report.var_log_deriv, &report.max_jump) {
        (LogQuantity::Exact(k), LogQuantity::Exact(m)) => {
            let exponent = k.add(&m.scale(report.jump_count as u32)).scale(s as u32);
            Scalar::Exact(exponent.exp().clone())
        }
        (k, m) => Scalar::Float((s as f64 * (k.to_f64() + report.jump_count as f64 * m.to_f64())).exp()),
    }
}

/// `e^{K_lip Σ_{i<n} |f^i(J)|}`. Errors when some `f^i(J)`, `i < n`, has a
/// breakpoint in its interior.
pub fn bound_sum(f: &PiecewiseMap, j: &Interval, n: usize) -> Result<Scalar> {
    let k_lip = classify(f).lipschitz.ok_or_else(|| Error::Precondition("map is not Lipschitz on branches".into()))?;
    if f.is_affine() {
        let mut cur = j.closure();
        for _ in 0..n {
            if let Some(b) = f.interior_breakpoints().iter().find(|b| cur.contains_interior(b)) {
                return Err(Error::Precondition(format!("iterate {cur} crosses the breakpoint {}", crate::scalar::fmt_rational(b))));
            }
            cur = f.image_interval(&cur)?;
        }
        // ln|Df| is constant on each affine branch.
        debug_assert!(k_lip.to_f64() == 0.0);
        return Ok(Scalar::Exact(Rational::one()));
    }
    let lengths = float_iterate_lengths(f, j, n)?;
    Ok(Scalar::Float((k_lip.to_f64() * lengths.iter().sum::<f64>()).exp()))
}

fn float_iterate_lengths(f: &PiecewiseMap, j: &Interval, n: usize) -> Result<Vec<f64>> {
    let bps: Vec<f64> = f.interior_breakpoints().iter().map(to_f64).collect();
    let (mut a, mut b) = (to_f64(&j.lo), to_f64(&j.hi));
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        if let Some(bp) = bps.iter().find(|&&bp| a + FLOAT_SLACK < bp && bp < b - FLOAT_SLACK) {
            return Err(Error::Precondition(format!("iterate [{a},{b}] crosses the breakpoint {bp}")));
        }
        out.push(b - a);
        let (fa, fb) = (f.eval_f64(a), f.eval_f64(b));
        (a, b) = (fa.min(fb), fa.max(fb));
    }
    Ok(out)
}

/// Lower bound `e^{-Kτ}(τ/σ - 1)` on `|T \ J| / |J|` for nested intervals
/// with iterate-length sums `σ < τ`.
pub fn extension_bound(sigma: &Scalar, tau: &Scalar, k: &Scalar) -> Result<Scalar> {
    if let (Scalar::Exact(s), Scalar::Exact(t), Scalar::Exact(kk)) = (sigma, tau, k) {
        if !s.is_positive() || s >= t || kk.is_negative() {
            return Err(Error::InvalidArgument("need 0 < σ < τ and K >= 0".into()));
        }
        let base = t / s - Rational::one();
        if kk.is_zero() {
            return Ok(Scalar::Exact(base));
        }
        return Ok(Scalar::Float((-to_f64(kk) * to_f64(t)).exp() * to_f64(&base)));
    }
    let (s, t, kk) = (sigma.to_f64(), tau.to_f64(), k.to_f64());
    if !(s > 0.0 && s < t && kk >= 0.0) {
        return Err(Error::InvalidArgument("need 0 < σ < τ and K >= 0".into()));
    }
    Ok(Scalar::Float((-kk * t).exp() * (t / s - 1.0)))
}

#[derive(Clone, Debug, PartialEq)]
pub struct DistortionReport {
    pub j: Interval,
    pub n: usize,
    pub empirical: Scalar,
    /// Intersection multiplicity of `{f^i(J)}_{i<n}`.
    pub s: usize,
    /// `f^i(J)` for `i < n` (closed).
    pub iterates: Vec<Interval>,
    /// `Some` when the map is in class `𝔠`.
    pub bound_multiplicity: Option<Scalar>,
    /// `Some` when the map is in class `𝔇` and `J` stays inside one branch of
    /// `f^n`.
    pub bound_sum: Option<Scalar>,
    /// `exp` of the total `ln|Df|` jump inside the iterates (affine maps).
    pub jump_product: Option<Scalar>,
    pub pass: bool,
}

/// Exact for affine maps: `J` is split forward at breakpoints into the
/// pieces on which `f^n` is affine, and the distortion is the ratio of the
/// largest to the smallest composed `|slope|`. Smooth maps are sampled.
pub fn empirical_distortion(f: &PiecewiseMap, j: &Interval, n: usize) -> Result<DistortionReport> {
    let j = j.closure();
    if j.is_empty() || !f.domain().contains(&j.lo) || !f.domain().contains(&j.hi) {
        return Err(Error::InvalidArgument(format!("{j} is not a nonempty subinterval of the domain")));
    }
    let class = classify(f);
    let (empirical, iterates, jump_product) = if f.is_affine() { affine_distortion(f, &j, n)? } else { smooth_distortion(f, &j, n)? };
    let s = intersection_multiplicity(&iterates);
    let bound_multiplicity = class.in_c.then(|| bound_multiplicity(&class, s));
    let bound_sum = if class.in_d { bound_sum(f, &j, n).ok() } else { None };
    let pass = [&bound_multiplicity, &bound_sum].into_iter().flatten().all(|b| scalar_le(&empirical, b));
    Ok(DistortionReport { j, n, empirical, s, iterates, bound_multiplicity, bound_sum, jump_product, pass })
}

fn scalar_le(a: &Scalar, b: &Scalar) -> bool {
    match (a, b) {
        (Scalar::Exact(x), Scalar::Exact(y)) => x <= y,
        _ => a.to_f64() <= b.to_f64() * (1.0 + FLOAT_SLACK),
    }
}

type Pieces = Vec<(Interval, Rational)>;

fn affine_distortion(f: &PiecewiseMap, j: &Interval, n: usize) -> Result<(Scalar, Vec<Interval>, Option<Scalar>)> {
    let degenerate = j.is_degenerate();
    let mut pieces: Pieces = vec![(j.clone(), Rational::one())];
    let mut iterates = Vec::with_capacity(n);
    let mut jumps = LogValue::zero();
    for _ in 0..n {
        let hull = Interval::closed(
            pieces.iter().map(|p| p.0.lo.clone()).min().expect("nonempty"),
            pieces.iter().map(|p| p.0.hi.clone()).max().expect("nonempty"),
        );
        for (k, b) in f.interior_breakpoints().iter().enumerate() {
            if hull.contains_interior(b) {
                let (l, r) = (f.affine(k)?.0.abs(), f.affine(k + 1)?.0.abs());
                if l != r {
                    jumps = jumps.add(&LogValue::abs_diff(&l, &r));
                }
            }
        }
        iterates.push(hull);
        let mut next = Vec::new();
        for (piece, slope) in &pieces {
            for i in 0..f.branch_count() {
                let part = piece.intersect(&f.branch_domain(i));
                if part.is_empty() || (part.is_degenerate() && !degenerate) {
                    continue;
                }
                let (s, t) = f.affine(i)?;
                next.push((part.affine_image(s, t), slope * s));
                if degenerate {
                    break;
                }
            }
        }
        if next.len() as u128 > DEFAULT_WORD_BUDGET {
            return Err(Error::BudgetExceeded { words: next.len() as u128, budget: DEFAULT_WORD_BUDGET });
        }
        pieces = next;
    }
    let mags = pieces.iter().map(|p| p.1.abs());
    let max = mags.clone().max().expect("nonempty");
    let min = mags.min().expect("nonempty");
    Ok((Scalar::Exact(max / min), iterates, Some(Scalar::Exact(jumps.exp().clone()))))
}

fn smooth_distortion(f: &PiecewiseMap, j: &Interval, n: usize) -> Result<(Scalar, Vec<Interval>, Option<Scalar>)> {
    let (a, b) = (to_f64(&j.lo), to_f64(&j.hi));
    let mut hulls = vec![(f64::INFINITY, f64::NEG_INFINITY); n];
    let (mut max, mut min) = (0.0f64, f64::INFINITY);
    for s in 0..FLOAT_SAMPLES {
        let mut x = a + (b - a) * s as f64 / (FLOAT_SAMPLES - 1) as f64;
        let mut d = 1.0;
        for h in hulls.iter_mut() {
            h.0 = h.0.min(x);
            h.1 = h.1.max(x);
            d *= f.deriv_f64(x).abs();
            x = f.eval_f64(x);
        }
        max = max.max(d);
        min = min.min(d);
    }
    let iterates = hulls
        .into_iter()
        .map(|(lo, hi)| {
            let q = |v: f64| Rational::from_float(v).ok_or_else(|| Error::Number(v.to_string()));
            Ok(Interval::closed(q(lo)?, q(hi)?))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((Scalar::Float(max / min), iterates, None))
}

impl fmt::Display for DistortionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "J={} n={} empirical={} S={}", self.j, self.n, self.empirical, self.s)
    }
}
