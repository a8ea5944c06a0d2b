use super::{nice_test, Niceness, SymmetricInterval};
use crate::error::{Error, Result};
use crate::interval::{Interval, IntervalSet};
use crate::map_model::PiecewiseMap;
use crate::scalar::fmt_rational;

#[derive(Clone, Debug, PartialEq)]
pub struct ReturnComponent {
    pub interval: Interval,
    /// Smallest `k > 0` with `f^k(y) ∈ U_x`, constant on the component.
    pub transfer_time: usize,
    /// Closure of `f^k` of the component.
    pub image: Interval,
    /// Both endpoints of the component land on `∂U_x` or on an endpoint of
    /// the domain under `f^k`.
    pub endpoints_on_boundary: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReturnStructure {
    pub base: SymmetricInterval,
    pub horizon: usize,
    /// Components of `D_x` found up to the horizon, sorted by position.
    pub components: Vec<ReturnComponent>,
    /// Points with no return by the horizon.
    pub unresolved: IntervalSet,
}

impl ReturnStructure {
    pub fn component_containing(&self, y: &crate::scalar::Rational) -> Option<&ReturnComponent> {
        self.components.iter().find(|c| c.interval.contains(y))
    }
}

/// `E_k = f^{-k}(U_x) \ ⋃_{0<j<k} f^{-j}(U_x)` for `k = 1..=horizon`, computed
/// by exact preimages. Points of `U_x` itself get their genuine return time.
pub fn first_return(f: &PiecewiseMap, base: &SymmetricInterval, horizon: usize) -> Result<ReturnStructure> {
    f.require_affine()?;
    let u = IntervalSet::from_interval(base.u.clone());
    let mut pre = u.clone();
    let mut covered = IntervalSet::empty();
    let mut components = Vec::new();
    let domain_ends = [f.lo().clone(), f.hi().clone()];
    for k in 1..=horizon {
        pre = f.preimage_set(&pre)?;
        let fresh = pre.difference(&covered);
        for comp in fresh.components() {
            let mut image = comp.closure();
            for _ in 0..k {
                image = f.image_interval(&image)?;
            }
            if !image.is_subset_of(&base.u.closure()) {
                return Err(Error::Precondition(format!("component {comp} does not map into {}", base.u)));
            }
            let lands = |y: &crate::scalar::Rational| -> Result<bool> {
                let mut z = y.clone();
                for _ in 0..k {
                    z = f.eval_exact(&z)?;
                }
                Ok(z == base.u.lo || z == base.u.hi || domain_ends.contains(y))
            };
            let endpoints_on_boundary = lands(&comp.lo)? && lands(&comp.hi)?;
            components.push(ReturnComponent { interval: comp.clone(), transfer_time: k, image, endpoints_on_boundary });
        }
        covered = covered.union(&fresh);
    }
    components.sort_by(|a, b| a.interval.lo.cmp(&b.interval.lo));
    let unresolved = covered.complement_in(&f.domain());
    Ok(ReturnStructure { base: base.clone(), horizon, components, unresolved })
}

/// The symmetric interval `U_x = f^{-1}(S_z)` around `c`, where `S_z` is the
/// component of `D_z` containing `f(c)`. The returned base point is on the
/// same side of `c` as `z`.
pub fn psi(f: &PiecewiseMap, z: &SymmetricInterval, horizon: usize) -> Result<SymmetricInterval> {
    match nice_test(f, z, horizon)? {
        Niceness::Nice { .. } => {}
        other => {
            return Err(Error::Precondition(format!("{} is not known to be nice: {other:?}", fmt_rational(&z.x))));
        }
    }
    let c = &z.c;
    let fc = f.eval_exact(c)?;
    let returns = first_return(f, z, horizon)?;
    let s = returns.component_containing(&fc).ok_or_else(|| {
        Error::Precondition(format!("f(c) = {} does not return to {} within {horizon} steps", fmt_rational(&fc), z.u))
    })?;
    // f(c) may be an endpoint of S_z, so pull back the closure.
    let pre = f.preimage_set(&IntervalSet::from_interval(s.interval.closure()))?;
    let around = pre.component_containing(c).expect("c maps into S_z").clone();
    let x = if z.x < *c { around.lo.clone() } else { around.hi.clone() };
    let out = super::symmetric_interval(f, c, &x)?;
    if out.u.closure() != around.closure() {
        return Err(Error::Precondition(format!("preimage {around} of S_z is not symmetric around {}", fmt_rational(c))));
    }
    Ok(out)
}
