use std::fmt;

use num_traits::{One, Signed};

use super::{Branch, PiecewiseMap};
use crate::scalar::{to_f64, LogValue, Rational, Scalar};

/// A logarithmic constant: exact for affine maps, a float otherwise.
#[derive(Clone, Debug, PartialEq)]
pub enum LogQuantity {
    Exact(LogValue),
    Float(f64),
}

impl LogQuantity {
    pub fn to_f64(&self) -> f64 {
        match self {
            LogQuantity::Exact(l) => l.to_f64(),
            LogQuantity::Float(v) => *v,
        }
    }

    pub fn as_exact(&self) -> Option<&LogValue> {
        match self {
            LogQuantity::Exact(l) => Some(l),
            LogQuantity::Float(_) => None,
        }
    }
}

impl fmt::Display for LogQuantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LogQuantity::Exact(l) => write!(f, "{l}"),
            LogQuantity::Float(v) => write!(f, "{v}"),
        }
    }
}

/// Membership in the nested regularity classes and their constants.
///
/// `in_e`: `ln|Df|` Lipschitz on the whole interval. `in_d`: Lipschitz on each
/// branch. `in_c`: `ln|Df|` of bounded variation with `1/C <= |Df| <= C`.
#[derive(Clone, Debug, PartialEq)]
pub struct ClassReport {
    pub in_e: bool,
    pub in_d: bool,
    pub in_c: bool,
    /// `C >= 1` with `1/C <= |Df| <= C`.
    pub deriv_bound: Scalar,
    /// `K = Var(ln|Df|)`.
    pub var_log_deriv: LogQuantity,
    /// Number of points where `|Df|` is discontinuous.
    pub jump_count: usize,
    /// Largest jump of `ln|Df|`.
    pub max_jump: LogQuantity,
    /// Lipschitz constant of `ln|Df|` on branches (globally when `in_e`).
    pub lipschitz: Option<Scalar>,
}

pub fn classify(f: &PiecewiseMap) -> ClassReport {
    if f.is_affine() {
        classify_affine(f)
    } else {
        classify_smooth(f)
    }
}

fn classify_affine(f: &PiecewiseMap) -> ClassReport {
    let slopes: Vec<Rational> = (0..f.branch_count()).map(|i| f.affine(i).expect("affine").0.abs()).collect();
    let mut bound = Rational::one();
    for s in &slopes {
        let r = if s >= &Rational::one() { s.clone() } else { s.recip() };
        if r > bound {
            bound = r;
        }
    }
    let mut var = LogValue::zero();
    let mut max_jump = LogValue::zero();
    let mut jumps = 0;
    for w in slopes.windows(2) {
        if w[0] != w[1] {
            let j = LogValue::abs_diff(&w[0], &w[1]);
            jumps += 1;
            var = var.add(&j);
            if j > max_jump {
                max_jump = j;
            }
        }
    }
    ClassReport {
        in_e: jumps == 0,
        in_d: true,
        in_c: true,
        deriv_bound: Scalar::Exact(bound),
        var_log_deriv: LogQuantity::Exact(var),
        jump_count: jumps,
        max_jump: LogQuantity::Exact(max_jump),
        lipschitz: Some(Scalar::Exact(Rational::from_integer(0.into()))),
    }
}

fn classify_smooth(f: &PiecewiseMap) -> ClassReport {
    const JUMP_TOL: f64 = 1e-9;
    let mut lower = f64::INFINITY;
    let mut upper: f64 = 0.0;
    let mut lip: f64 = 0.0;
    let mut var = 0.0;
    for (i, b) in f.branches().iter().enumerate() {
        let (lo, hi, k) = match b {
            Branch::Affine { slope, .. } => {
                let s = to_f64(slope).abs();
                (s, s, 0.0)
            }
            Branch::Smooth(s) => {
                let (lo, hi) = s.deriv_bounds();
                (lo, hi, s.log_deriv_lipschitz())
            }
        };
        lower = lower.min(lo);
        upper = upper.max(hi);
        lip = lip.max(k);
        let width = to_f64(&f.edges()[i + 1]) - to_f64(&f.edges()[i]);
        var += (k * width).min((hi / lo).ln());
    }
    let mut jumps = 0;
    let mut max_jump: f64 = 0.0;
    for k in 1..f.edges().len() - 1 {
        let x = to_f64(&f.edges()[k]);
        let a = f.branches()[k - 1].deriv_f64(x).abs().ln();
        let b = f.branches()[k].deriv_f64(x).abs().ln();
        let j = (a - b).abs();
        if j > JUMP_TOL {
            jumps += 1;
            var += j;
            max_jump = max_jump.max(j);
        }
    }
    let in_c = lower > 0.0 && upper.is_finite();
    let in_d = in_c && lip.is_finite();
    ClassReport {
        in_e: in_d && jumps == 0,
        in_d,
        in_c,
        deriv_bound: Scalar::Float(upper.max(1.0 / lower).max(1.0)),
        var_log_deriv: LogQuantity::Float(var),
        jump_count: jumps,
        max_jump: LogQuantity::Float(max_jump),
        lipschitz: in_d.then_some(Scalar::Float(lip)),
    }
}
