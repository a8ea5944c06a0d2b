use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::interval::{Interval, IntervalSet};
use crate::map_model::{monotone_branches, PiecewiseMap, Side, DEFAULT_WORD_BUDGET};
use crate::scalar::{fmt_rational, Rational};

/// How a boundary point `a` of a component of `V_k` arises.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EndpointTag {
    /// `f^k(a) ∈ {a, τ(a)}`.
    Returns,
    /// `a` is an end of the window `W`.
    WindowEdge,
    /// `a = c`, where `U_c` is empty.
    TurningPoint,
    /// `f^i(a) ∈ {a, τ(a)}` for this `i < k` but not for `k`.
    EarlierReturn(usize),
    Unexplained,
}

#[derive(Clone, Debug, PartialEq)]
pub struct VkComponent {
    pub k: usize,
    pub interval: Interval,
    pub tags: [EndpointTag; 2],
}

/// Affine `y ↦ a·y + b`.
#[derive(Clone, Debug)]
struct Lin {
    a: Rational,
    b: Rational,
}

impl Lin {
    fn sub(&self, o: &Lin) -> Lin {
        Lin { a: &self.a - &o.a, b: &self.b - &o.b }
    }
}

/// `{y ∈ p : l(y) > 0}`.
fn positive_on(l: &Lin, p: &Interval) -> IntervalSet {
    if l.a.is_zero() {
        return if l.b.is_positive() { IntervalSet::from_interval(p.clone()) } else { IntervalSet::empty() };
    }
    let root = -&l.b / &l.a;
    let half = if l.a.is_positive() {
        Interval::new(root, p.hi.clone(), false, true)
    } else {
        Interval::new(p.lo.clone(), root, true, false)
    };
    IntervalSet::from_interval(half.intersect(p))
}

/// Components of `V_k = {y ∈ W : f^i(y) ∉ U_y for 0 < i < k, f^k(y) ∈ U_y}`
/// where `U_y` is the open interval between `y` and `τ(y)`.
///
/// On each piece of a branch of `f^k` on one side of `c`, every `f^i` and
/// `τ` are affine, so each condition is a pair of linear inequalities.
pub fn vk_components(f: &PiecewiseMap, c: &Rational, w: &Interval, k: usize) -> Result<Vec<VkComponent>> {
    f.require_affine()?;
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    let dom = f.tau_domain(c)?;
    if !w.closure().is_subset_of(&dom) || !w.contains_interior(c) {
        return Err(Error::InvalidArgument(format!("window {w} must contain {} and lie in {dom}", fmt_rational(c))));
    }
    let left = f.branch_on_side(c, Side::Left)?;
    let right = f.branch_on_side(c, Side::Right)?;
    let (sl, tl) = f.affine(left)?;
    let (sr, tr) = f.affine(right)?;
    let tau_left = Lin { a: sl / sr, b: (tl - tr) / sr };
    let tau_right = Lin { a: sr / sl, b: (tr - tl) / sl };
    let id = Lin { a: Rational::one(), b: Rational::zero() };
    let halves = [
        (Interval::closed(w.lo.clone(), c.clone()), &id, &tau_left),
        (Interval::closed(c.clone(), w.hi.clone()), &tau_right, &id),
    ];

    let mut parts = Vec::new();
    for b in monotone_branches(f, k, DEFAULT_WORD_BUDGET)? {
        for (half, lower, upper) in &halves {
            let p = b.domain.intersect(half);
            if p.is_empty() || p.is_degenerate() {
                continue;
            }
            let mut g = id.clone();
            let mut set = IntervalSet::from_interval(p.clone());
            for (i, &idx) in b.word.indices().iter().enumerate() {
                let (s, t) = f.affine(idx)?;
                g = Lin { a: s * &g.a, b: s * &g.b + t };
                let inside = positive_on(&g.sub(lower), &p).intersect(&positive_on(&upper.sub(&g), &p));
                set = if i + 1 == k { set.intersect(&inside) } else { set.difference(&inside) };
                if set.is_empty() {
                    break;
                }
            }
            parts.extend(set.into_components());
        }
    }
    let vk = IntervalSet::from_intervals(parts).intersect_interval(w);
    vk.components()
        .iter()
        .map(|t| {
            let tags = [tag(f, c, w, k, &t.lo)?, tag(f, c, w, k, &t.hi)?];
            Ok(VkComponent { k, interval: t.clone(), tags })
        })
        .collect()
}

fn tag(f: &PiecewiseMap, c: &Rational, w: &Interval, k: usize, a: &Rational) -> Result<EndpointTag> {
    if a == &w.lo || a == &w.hi {
        return Ok(EndpointTag::WindowEdge);
    }
    if a == c {
        return Ok(EndpointTag::TurningPoint);
    }
    let ta = f.tau(c, a)?;
    let mut y = a.clone();
    let mut earlier = None;
    for i in 1..=k {
        y = f.eval_exact(&y)?;
        if &y == a || y == ta {
            if i == k {
                return Ok(EndpointTag::Returns);
            }
            earlier.get_or_insert(i);
        }
    }
    Ok(earlier.map_or(EndpointTag::Unexplained, EndpointTag::EarlierReturn))
}
