use imdyn::expansion_certifier::expansion_n;
use imdyn::fixtures::{self, random_affine_map, RandomMapOptions};
use imdyn::interval::{Interval, IntervalSet};
use imdyn::map_model::PiecewiseMap;
use imdyn::measure_lab::{
    first_return, omega_approx, symmetric_interval, transfer_matrix, ulam_acip, vk_components, UlamDensity, UlamOptions,
};
use imdyn::scalar::{int, rat, to_f64, Rational};
use num_traits::One;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// `∫_S ρ` for a piecewise-constant density and a union of intervals.
fn integrate(d: &UlamDensity, s: &IntervalSet) -> f64 {
    let mut total = 0.0;
    for comp in s.components() {
        for i in 0..d.bins() {
            let (lo, hi) = d.bin(i);
            let part = comp.intersect(&Interval::closed(lo.clone(), hi.clone()));
            if !part.is_empty() {
                total += d.density[i] * to_f64(&part.length());
            }
        }
    }
    total
}

fn expanding_maps() -> Vec<PiecewiseMap> {
    let mut maps: Vec<PiecewiseMap> = fixtures::repelling_suite().into_iter().map(|(_, f)| f).collect();
    maps.push(fixtures::tent(rat(3, 2)));
    maps
}

#[test]
fn pushforward_consistency() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    for f in expanding_maps() {
        let cert = expansion_n(&f, 12).unwrap();
        let d = ulam_acip(&f, &UlamOptions::new(40), cert.certificate()).unwrap();
        assert!((d.masses.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        for _ in 0..20 {
            let bins: Vec<Interval> = (0..d.bins())
                .filter(|_| rng.gen_bool(0.3))
                .map(|i| {
                    let (lo, hi) = d.bin(i);
                    Interval::closed(lo.clone(), hi.clone())
                })
                .collect();
            let a = IntervalSet::from_intervals(bins);
            let pulled = f.preimage_set(&a).unwrap();
            let gap = (integrate(&d, &pulled) - integrate(&d, &a)).abs();
            // Ulam stationarity is exact on bin unions, so only the residual remains.
            assert!(gap <= d.invariance_residual + 1e-12, "gap {gap}, residual {}", d.invariance_residual);
        }
    }
}

#[test]
fn omega_full_tent_reaches_two_eps() {
    let tent = fixtures::full_tent();
    let o = omega_approx(&tent, &rat(1, 2), 2, 50, &[1e-2, 1e-3, 1e-4]).unwrap();
    for l in &o.levels {
        assert_eq!(l.cover_length, 2.0 * l.eps);
    }
}

#[test]
fn omega_decay_for_renormalizable_tent() {
    let f = fixtures::tent(rat(13, 10));
    let o = omega_approx(&f, &rat(1, 2), 1000, 1_000_000, &[1e-2, 1e-3, 1e-4]).unwrap();
    let lengths: Vec<f64> = o.levels.iter().map(|l| l.cover_length).collect();
    assert!(lengths.windows(2).all(|w| w[1] < w[0]), "{lengths:?}");
}

fn tent_from(s: i64) -> PiecewiseMap {
    PiecewiseMap::tent(rat(s, 1000)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn transfer_rows_sum_to_one(seed in any::<u64>(), m in 1usize..=40) {
        let f = random_affine_map(&mut ChaCha8Rng::seed_from_u64(seed), &RandomMapOptions::default());
        let (edges, rows) = transfer_matrix(&f, m).unwrap();
        prop_assert_eq!(edges.len(), m + 1);
        for row in rows {
            let s: Rational = row.iter().map(|(_, p)| p.clone()).sum();
            prop_assert_eq!(s, Rational::one());
        }
    }

    #[test]
    fn vk_endpoints_return(s in 1420i64..=2000, k in 1usize..=5) {
        let f = tent_from(s);
        let c = rat(1, 2);
        let dom = f.tau_domain(&c).unwrap();
        let w = Interval::open(&c - (&c - &dom.lo) / int(2), &c + (&dom.hi - &c) / int(2));
        for v in vk_components(&f, &c, &w, k).unwrap() {
            for a in [&v.interval.lo, &v.interval.hi] {
                if a == &w.lo || a == &w.hi {
                    continue;
                }
                let mut y = a.clone();
                for _ in 0..k {
                    y = f.eval_exact(&y).unwrap();
                }
                prop_assert!(y == *a || y == f.tau(&c, a).unwrap(), "k = {}, a = {}, f^k(a) = {}", k, a, y);
            }
            let mid = v.interval.midpoint();
            let u = symmetric_interval(&f, &c, &mid).unwrap();
            let mut y = mid.clone();
            for i in 1..=k {
                y = f.eval_exact(&y).unwrap();
                prop_assert_eq!(u.u.contains(&y), i == k);
            }
        }
    }

    #[test]
    fn return_components_land_on_the_boundary(s in 1420i64..=2000, x in 300i64..=480) {
        let f = tent_from(s);
        let c = rat(1, 2);
        let base = symmetric_interval(&f, &c, &rat(x, 1000)).unwrap();
        let r = first_return(&f, &base, 5).unwrap();
        let ends = [f.lo().clone(), f.hi().clone()];
        for comp in &r.components {
            prop_assert!(comp.image.is_subset_of(&base.u.closure()));
            for a in [&comp.interval.lo, &comp.interval.hi] {
                // Either some f^j(a), j <= k, sits on the boundary of U_x (an
                // earlier iterate can cut a component when U_x is not nice), or
                // the orbit passes a breakpoint first.
                let mut y = a.clone();
                let (mut on_boundary, mut hits_breakpoint) = (false, false);
                for _ in 0..comp.transfer_time {
                    hits_breakpoint |= f.interior_breakpoints().contains(&y);
                    y = f.eval_exact(&y).unwrap();
                    on_boundary |= y == base.u.lo || y == base.u.hi;
                }
                prop_assert!(on_boundary || hits_breakpoint || ends.contains(a), "endpoint {} of {}", a, comp.interval);
            }
        }
    }
}
