//! Property tests for the exact algebraic identities.

use proptest::collection::vec;
use proptest::prelude::*;

use nds::family::SetFamily;
use nds::ideals::{count_ideals, ideals_bruteforce, nds_of_map};
use nds::preorder::FunctionalMap;
use nds::reduction::union_sum_check;
use nds::search::{map_count, map_from_index};

fn arb_family(n: usize) -> impl Strategy<Value = SetFamily> {
    vec(0u64..1 << n, 1..=1usize << n)
        .prop_map(move |masks| SetFamily::from_masks(n, masks).unwrap())
}

fn arb_map(n: usize) -> impl Strategy<Value = FunctionalMap> {
    vec(0usize..n, n).prop_map(|images| FunctionalMap::new(images).unwrap())
}

proptest! {
    #[test]
    fn union_sum_identity_always_holds(f1 in arb_family(4), f2 in arb_family(4)) {
        prop_assert!(union_sum_check(&f1, &f2).unwrap());
    }

    #[test]
    fn nds_equals_double_counted_degrees(f in arb_family(5)) {
        let via_degrees: i64 = f.degrees().iter().map(|&d| 2 * d as i64).sum::<i64>()
            - (f.len() * f.ground_size()) as i64;
        prop_assert_eq!(via_degrees, f.nds());
    }

    #[test]
    fn trace_never_grows_and_parallel_partner_preserves(f in arb_family(4), x in 0usize..4) {
        let traced = f.trace_at(x).unwrap();
        prop_assert!(traced.len() <= f.len());
        if (0..4).any(|v| v != x && f.parallel(x, v).unwrap()) {
            prop_assert_eq!(traced.len(), f.len());
        }
    }

    #[test]
    fn fast_paths_agree_with_enumeration(f in arb_map(5)) {
        let fam = ideals_bruteforce(&f).into_family();
        prop_assert_eq!(count_ideals(&f), fam.len() as u64);
        prop_assert_eq!(nds_of_map(&f), fam.nds());
    }

    #[test]
    fn average_rare_families_have_a_rare_element(f in arb_family(5)) {
        if f.is_average_rare() {
            prop_assert!((0..5).any(|u| f.is_rare(u).unwrap()));
        }
    }

    #[test]
    fn relabeling_preserves_nds(i in 0u64..map_count(4), seed in any::<u64>()) {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        let f = map_from_index(4, i);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut perm: Vec<usize> = (0..4).collect();
        perm.shuffle(&mut rng);
        let mut relabeled = vec![0usize; 4];
        for v in 0..4 {
            relabeled[perm[v]] = perm[f.apply(v)];
        }
        let g = FunctionalMap::new(relabeled).unwrap();
        prop_assert_eq!(nds_of_map(&f), nds_of_map(&g));
    }
}
