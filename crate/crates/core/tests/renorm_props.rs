use imdyn::renormalization::{renorm_tower, restrictive_candidates};
use imdyn::scalar::rat;
use imdyn::map_model::PiecewiseMap;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn returned_intervals_reverify(s in 101i64..=200, q in 2usize..=6) {
        let f = PiecewiseMap::tent(rat(s, 100)).unwrap();
        let c = rat(1, 2);
        for r in restrictive_candidates(&f, &c, q).unwrap() {
            prop_assert!(r.verify(&f).unwrap());
            prop_assert!(r.j.contains_interior(&c));
            for a in 0..q {
                for b in 0..q {
                    if a != b {
                        let overlap = r.iterates[a].interiors_overlap(&r.iterates[b]);
                        prop_assert!(!overlap);
                        prop_assert_eq!(overlap, r.iterates[b].interiors_overlap(&r.iterates[a]));
                    }
                }
            }
            prop_assert!(r.iterates[q].is_subset_of(&r.j));
        }
    }

    #[test]
    fn tower_levels_nest(s in 101i64..=150) {
        let f = PiecewiseMap::tent(rat(s, 100)).unwrap();
        let t = renorm_tower(&f, &rat(1, 2), 8).unwrap();
        for w in t.levels.windows(2) {
            prop_assert!(w[1].j.is_subset_of(&w[0].j));
            prop_assert_eq!(w[1].q % w[0].q, 0);
        }
        for l in &t.levels {
            prop_assert!(l.verify(&f).unwrap());
        }
    }
}
