//! Named example maps and a seeded generator of random affine maps.

use std::sync::Arc;

use rand::Rng;

use crate::map_model::{Branch, PiecewiseMap, QuadraticBranch};
use crate::scalar::{int, rat, Rational};

fn nodes(pts: &[(Rational, Rational)]) -> PiecewiseMap {
    PiecewiseMap::from_nodes(pts).expect("fixture maps are valid")
}

/// `x ↦ 2·min(x, 1 - x)`.
pub fn full_tent() -> PiecewiseMap {
    tent(int(2))
}

pub fn tent(slope: Rational) -> PiecewiseMap {
    PiecewiseMap::tent(slope).expect("tent slope in (0, 2]")
}

/// Slopes `3` and `-3/2`, turning point `1/3`, both branches onto `[0, 1]`.
pub fn three_halves() -> PiecewiseMap {
    nodes(&[(int(0), int(0)), (rat(1, 3), int(1)), (int(1), int(0))])
}

/// Three full branches of slopes `3, -3, 3`.
pub fn full_three_branch() -> PiecewiseMap {
    nodes(&[(int(0), int(0)), (rat(1, 3), int(1)), (rat(2, 3), int(0)), (int(1), int(1))])
}

/// Slopes `2, -14/5, -4/5` on `[0,1/2], [1/2,3/4], [3/4,1]`.
///
/// The last branch contracts, but it maps into `[1/10, 3/10]` whose next two
/// images avoid it, so every word through it also passes two expanding
/// branches.
pub fn contracting_branch() -> PiecewiseMap {
    nodes(&[(int(0), int(0)), (rat(1, 2), int(1)), (rat(3, 4), rat(3, 10)), (int(1), rat(1, 10))])
}

/// Slopes `3/2, 5/2, -2`: `|Df|` jumps at the point `1/4` and at the turning
/// point `1/2`, every branch expanding.
pub fn uneven_expanding() -> PiecewiseMap {
    nodes(&[(int(0), int(0)), (rat(1, 4), rat(3, 8)), (rat(1, 2), int(1)), (int(1), int(0))])
}

/// Increasing map with an attracting fixed point `1/2` (slope `1/2`) whose
/// immediate basin is `(0, 1)`.
pub fn attracting_middle() -> PiecewiseMap {
    nodes(&[(int(0), int(0)), (rat(1, 4), rat(3, 8)), (rat(3, 4), rat(5, 8)), (int(1), int(1))])
}

/// Attracting fixed point `1/2` whose immediate basin ends at the turning
/// point `7/8`, itself a repelling fixed point.
pub fn basin_to_turning_point() -> PiecewiseMap {
    nodes(&[
        (int(0), int(0)),
        (rat(1, 4), rat(3, 8)),
        (rat(3, 4), rat(5, 8)),
        (rat(7, 8), rat(7, 8)),
        (int(1), rat(1, 2)),
    ])
}

/// Slope `2` then `1/2`: the minimum `|Df|` is `1/2`, while `0` is a
/// repelling fixed point.
pub fn expanding_then_contracting() -> PiecewiseMap {
    nodes(&[(int(0), int(0)), (rat(1, 3), rat(2, 3)), (int(1), int(1))])
}

/// `2.4x - 0.8x²` on `[0, 1/2]` and its mirror image on `[1/2, 1]`.
///
/// `|Df|` ranges over `[8/5, 12/5]` and `ln|Df|` is `1`-Lipschitz on each
/// branch.
pub fn smooth_unimodal() -> PiecewiseMap {
    let left = QuadraticBranch::new(0.0, 0.5, 0.0, 0.0, 2.4, -0.8).expect("monotone");
    let right = QuadraticBranch::new(0.5, 1.0, 1.0, 0.0, -2.4, -0.8).expect("monotone");
    PiecewiseMap::new(
        int(0),
        int(1),
        vec![rat(1, 2)],
        vec![Branch::Smooth(Arc::new(left)), Branch::Smooth(Arc::new(right))],
    )
    .expect("fixture maps are valid")
}

/// Repelling-only maps with no restrictive interval, used by the growth and
/// expansion suites.
pub fn repelling_suite() -> Vec<(&'static str, PiecewiseMap)> {
    vec![
        ("full_tent", full_tent()),
        ("tent_19_10", tent(rat(19, 10))),
        ("three_halves", three_halves()),
        ("full_three_branch", full_three_branch()),
        ("uneven_expanding", uneven_expanding()),
    ]
}

/// Options for [`random_affine_map`].
#[derive(Clone, Debug)]
pub struct RandomMapOptions {
    pub min_branches: usize,
    pub max_branches: usize,
    /// Breakpoints and node values are multiples of `1/grid`.
    pub grid: i64,
}

impl Default for RandomMapOptions {
    fn default() -> Self {
        RandomMapOptions { min_branches: 1, max_branches: 4, grid: 24 }
    }
}

/// A random continuous piecewise-affine self-map of `[0, 1]` with nonzero
/// slopes, built by interpolating random nodes on a rational grid.
pub fn random_affine_map<R: Rng + ?Sized>(rng: &mut R, opts: &RandomMapOptions) -> PiecewiseMap {
    let g = opts.grid;
    let pieces = rng.gen_range(opts.min_branches..=opts.max_branches);
    let mut xs: Vec<i64> = Vec::with_capacity(pieces + 1);
    xs.push(0);
    while xs.len() < pieces {
        let x = rng.gen_range(1..g);
        if !xs.contains(&x) {
            xs.push(x);
        }
    }
    xs.push(g);
    xs.sort_unstable();
    let mut ys: Vec<i64> = Vec::with_capacity(xs.len());
    for _ in 0..xs.len() {
        loop {
            let y = rng.gen_range(0..=g);
            if ys.last() != Some(&y) {
                ys.push(y);
                break;
            }
        }
    }
    let pts: Vec<(Rational, Rational)> = xs.iter().zip(&ys).map(|(&x, &y)| (rat(x, g), rat(y, g))).collect();
    nodes(&pts)
}
