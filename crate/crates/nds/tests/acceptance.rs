//! Acceptance suite: one test per criterion, each printing a PASS line.
//! Run with `cargo test --test acceptance -- --nocapture` to see the lines.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use nds::family::{SetFamily, SubsetMask};
use nds::ideals::{ideals_bruteforce, ideals_forest};
use nds::preorder::FunctionalMap;
use nds::reduction::{certify, verify_certificate};
use nds::rooted::{RootedFamily, RootedSet, UniqueRootFamily};
use nds::search::{
    map_count, map_from_index, mine_conjecture, miner_nds_at, unique_root_family_at,
    verify_main_theorem, MineOptions, ScanOptions,
};
use nds::suites;

fn map(images: &[usize]) -> FunctionalMap {
    FunctionalMap::new(images.to_vec()).unwrap()
}

#[test]
fn criterion_1_worked_examples() {
    let chain = ideals_bruteforce(&map(&[1, 1])).into_family();
    assert_eq!(chain.nds(), 0);
    assert!(chain.is_average_rare());

    let collapsed = ideals_bruteforce(&map(&[1, 2, 1])).into_family();
    assert_eq!(collapsed.nds(), -1);

    let two_covers: RootedFamily =
        serde_json::from_str(r#"{"n":3,"rules":[{"stem":[1],"root":0},{"stem":[2],"root":0}]}"#)
            .unwrap();
    let system = two_covers.closure_system();
    assert_eq!(system.nds(), 1);
    assert!(!system.is_average_rare());
    println!("PASS criterion 1: worked-example NDS values 0 / -1 / +1, exact");
}

#[test]
fn criterion_2_main_theorem_full_scan() {
    for n in 1..=6 {
        let r = verify_main_theorem(n, &ScanOptions::default()).unwrap();
        assert_eq!(r.instances_scanned, map_count(n), "full enumeration at n={n}");
        assert_eq!(r.max_nds, 0, "max nds at n={n}");
        assert!(r.counterexamples.is_empty(), "counterexamples at n={n}");
    }
    let r = verify_main_theorem(7, &ScanOptions::default()).unwrap();
    assert_eq!(r.instances_scanned, 823_543);
    assert_eq!(r.max_nds, 0);
    assert!(r.counterexamples.is_empty());
    println!("PASS criterion 2: main theorem holds over all maps, n = 1..7");
}

#[test]
fn criterion_3_secondary_theorem_poset_scan() {
    for n in 1..=6 {
        let opts = ScanOptions {
            posets_only: true,
            ..Default::default()
        };
        let r = verify_main_theorem(n, &opts).unwrap();
        assert_eq!(r.max_nds, 0, "max nds at n={n}");
        assert!(r.counterexamples.is_empty());
        assert!(r.instances_scanned < map_count(n) || n == 1);
    }
    println!("PASS criterion 3: secondary theorem holds on all poset instances, n = 1..6");
}

#[test]
fn criterion_4_lemma_suites() {
    let results = suites::run_all(5, suites::DEFAULT_SEED).unwrap();
    for r in &results {
        assert!(r.passed, "suite {} failed", r.id);
    }
    println!("PASS criterion 4: per-lemma suites exhaustive at n = 5 (deletion/count at 6)");
}

#[test]
fn criterion_5_oracle_equivalence() {
    for n in 1..=5 {
        for i in 0..map_count(n) {
            let f = map_from_index(n, i);
            assert_eq!(
                ideals_forest(&f).family(),
                ideals_bruteforce(&f).family(),
                "forest vs brute force for {f}"
            );
        }
    }
    // fixpoint closures coincide with the minimal containing members
    let mut rng = ChaCha8Rng::seed_from_u64(suites::DEFAULT_SEED);
    for _ in 0..1000 {
        let rf = suites::random_rooted_family(&mut rng, 4).unwrap();
        let system = rf.closure_system();
        for bits in 0u64..16 {
            let x = SubsetMask::from_bits(bits, 4).unwrap();
            let closed = rf.closure_of(x).unwrap();
            let minimal = system
                .members()
                .iter()
                .filter(|m| x.is_subset_of(m))
                .min_by_key(|m| m.len())
                .copied()
                .unwrap();
            assert!(system.contains(&closed));
            assert!(x.is_subset_of(&closed));
            assert_eq!(closed.len(), minimal.len());
            assert!(system
                .members()
                .iter()
                .filter(|m| x.is_subset_of(m))
                .all(|m| closed.is_subset_of(m)));
        }
    }
    println!("PASS criterion 5: forest = brute force (n <= 5); fixpoint closures minimal");
}

#[test]
fn criterion_6_certificates() {
    for n in 1..=5 {
        for i in 0..map_count(n) {
            let f = map_from_index(n, i);
            let cert = certify(&f).unwrap_or_else(|e| panic!("certify({f}): {e}"));
            assert!(cert.conclusion_nds <= 0);
            verify_certificate(&cert.record()).unwrap();
        }
    }
    for (images, golden) in [
        (vec![1usize, 1], include_str!("golden/cert_chain2.json")),
        (vec![1, 2, 1], include_str!("golden/cert_preorder3.json")),
    ] {
        let cert = certify(&map(&images)).unwrap();
        let got = serde_json::to_value(cert.record()).unwrap();
        let want: serde_json::Value = serde_json::from_str(golden).unwrap();
        assert_eq!(got, want, "golden certificate for {images:?}");
    }
    println!("PASS criterion 6: certificates verified for all maps n <= 5; goldens match");
}

#[test]
fn criterion_7_conjecture_miner() {
    let r = mine_conjecture(4, 3, &MineOptions::default()).unwrap();
    assert_eq!(r.instances_scanned, 4096);
    assert!(r.counterexamples.is_empty());

    let r = mine_conjecture(5, 4, &MineOptions::default()).unwrap();
    assert_eq!(r.instances_scanned, 16u64.pow(5));
    assert!(r.counterexamples.is_empty());

    // miner values vs an independent brute-force recomputation
    let mut rng = ChaCha8Rng::seed_from_u64(suites::DEFAULT_SEED);
    for _ in 0..100 {
        let index = rng.gen_range(0..16u64.pow(5));
        let fam = unique_root_family_at(5, 4, false, index).unwrap();
        let mut members: i64 = 0;
        let mut total: i64 = 0;
        for bits in 0u64..32 {
            let set = SubsetMask::from_bits(bits, 5).unwrap();
            let ok = fam.family().rules().iter().all(|r| {
                !r.stem().is_subset_of(&set) || set.contains(r.root())
            });
            if ok {
                members += 1;
                total += set.len() as i64;
            }
        }
        let oracle = 2 * total - members * 5;
        assert_eq!(miner_nds_at(5, 4, false, index).unwrap(), oracle);
    }

    // the two-cover family shares a root, so the miner must never see it
    let shared = RootedFamily::new(
        3,
        vec![
            RootedSet::new(SubsetMask::from_elems(3, &[1]).unwrap(), 0).unwrap(),
            RootedSet::new(SubsetMask::from_elems(3, &[2]).unwrap(), 0).unwrap(),
        ],
    )
    .unwrap();
    assert!(UniqueRootFamily::new(shared).is_err());
    println!("PASS criterion 7: miner exhaustive at (4,3) and (5,4), zero counterexamples");
}

#[test]
fn criterion_8_determinism_across_jobs() {
    let strip = |mut v: serde_json::Value| {
        v["wall_time"] = serde_json::Value::Null;
        serde_json::to_string(&v).unwrap()
    };

    let scan = |jobs| {
        let opts = ScanOptions {
            jobs: Some(jobs),
            ..Default::default()
        };
        strip(serde_json::to_value(verify_main_theorem(4, &opts).unwrap()).unwrap())
    };
    assert_eq!(scan(1), scan(3));

    let mine = |jobs| {
        let opts = MineOptions {
            jobs: Some(jobs),
            ..Default::default()
        };
        strip(serde_json::to_value(mine_conjecture(4, 3, &opts).unwrap()).unwrap())
    };
    assert_eq!(mine(1), mine(4));
    println!("PASS criterion 8: reports byte-equal across worker counts (wall_time aside)");
}

#[test]
fn averaging_implication_on_mined_systems() {
    // every scanned closure system containing the empty set with nds <= 0
    // must expose a rare element
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..200 {
        let index = rng.gen_range(0..16u64.pow(5));
        let fam = unique_root_family_at(5, 4, false, index).unwrap();
        assert!(fam.family().contains_empty());
        let system = fam.family().closure_system();
        if system.nds() <= 0 && system.ground_size() >= 1 {
            assert!((0..5).any(|u| system.is_rare(u).unwrap()));
        }
    }
    let e3: SetFamily = SetFamily::from_masks(3, [0, 1, 3, 5, 7]).unwrap();
    assert!(!e3.is_average_rare());
}
