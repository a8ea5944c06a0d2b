use std::fmt;
use std::sync::Arc;

use crate::scalar::{fmt_rational, Rational};

/// A monotone branch with `C^1` regularity supplied by the caller.
///
/// This is the extension point for non-affine maps. Everything exact in the
/// crate (word enumeration, periodic orbits, certificates) refuses maps with
/// smooth branches; evaluation, derivatives, classification and the
/// summed-length distortion bound accept them.
pub trait SmoothBranch: Send + Sync + fmt::Debug {
    fn eval(&self, x: f64) -> f64;
    fn deriv(&self, x: f64) -> f64;
    /// `(lower, upper)` with `0 < lower <= |Df| <= upper` on the branch.
    fn deriv_bounds(&self) -> (f64, f64);
    /// Lipschitz constant of `ln|Df|` on the branch.
    fn log_deriv_lipschitz(&self) -> f64;
}

#[derive(Clone, Debug)]
pub enum Branch {
    /// `x ↦ slope·x + intercept` in global coordinates.
    Affine { slope: Rational, intercept: Rational },
    Smooth(Arc<dyn SmoothBranch>),
}

impl Branch {
    pub fn affine(slope: Rational, intercept: Rational) -> Self {
        Branch::Affine { slope, intercept }
    }

    pub fn is_affine(&self) -> bool {
        matches!(self, Branch::Affine { .. })
    }

    pub fn as_affine(&self) -> Option<(&Rational, &Rational)> {
        match self {
            Branch::Affine { slope, intercept } => Some((slope, intercept)),
            Branch::Smooth(_) => None,
        }
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        match self {
            Branch::Affine { slope, intercept } => {
                crate::scalar::to_f64(slope) * x + crate::scalar::to_f64(intercept)
            }
            Branch::Smooth(s) => s.eval(x),
        }
    }

    pub fn deriv_f64(&self, x: f64) -> f64 {
        match self {
            Branch::Affine { slope, .. } => crate::scalar::to_f64(slope),
            Branch::Smooth(s) => s.deriv(x),
        }
    }
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Branch::Affine { slope, intercept } => write!(
                f,
                "affine slope={} intercept={}",
                fmt_rational(slope),
                fmt_rational(intercept)
            ),
            Branch::Smooth(s) => write!(f, "smooth {s:?}"),
        }
    }
}

/// `x ↦ a + b·(x - x0) + c·(x - x0)²` on `[lo, hi]`.
///
/// The quadratic-plus-linear family used to make the per-branch Lipschitz
/// bound on `ln|Df|` non-trivial. Construction fails unless the derivative
/// keeps one sign on the branch.
#[derive(Clone, Debug)]
pub struct QuadraticBranch {
    lo: f64,
    hi: f64,
    a: f64,
    b: f64,
    c: f64,
    x0: f64,
}

impl QuadraticBranch {
    pub fn new(lo: f64, hi: f64, x0: f64, a: f64, b: f64, c: f64) -> Option<Self> {
        let q = QuadraticBranch { lo, hi, a, b, c, x0 };
        let (d0, d1) = (q.deriv(lo), q.deriv(hi));
        (lo < hi && d0 * d1 > 0.0).then_some(q)
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }
}

impl SmoothBranch for QuadraticBranch {
    fn eval(&self, x: f64) -> f64 {
        let t = x - self.x0;
        self.a + self.b * t + self.c * t * t
    }

    fn deriv(&self, x: f64) -> f64 {
        self.b + 2.0 * self.c * (x - self.x0)
    }

    fn deriv_bounds(&self) -> (f64, f64) {
        let (d0, d1) = (self.deriv(self.lo).abs(), self.deriv(self.hi).abs());
        (d0.min(d1), d0.max(d1))
    }

    fn log_deriv_lipschitz(&self) -> f64 {
        // |(ln|Df|)'| = |2c| / |Df|, largest where |Df| is smallest.
        2.0 * self.c.abs() / self.deriv_bounds().0
    }
}
