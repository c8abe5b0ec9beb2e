//! Per-lemma invariant suites, exhaustive over all maps up to a desk-scale
//! ground size.  Shared by `verify-lemmas` on the command line and by the
//! acceptance tests.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::Result;
use crate::family::{SetFamily, SubsetMask};
use crate::ideals::{ideals_bruteforce, ideals_forest};
use crate::preorder::FunctionalMap;
use crate::reduction::{
    certify, delete_root_step, trace_class_step, union_sum_check, verify_certificate,
};
use crate::rooted::{singleton_stems_of_map, RootedFamily, RootedSet};
use crate::search::{is_poset_map, map_count, map_from_index};

pub const DEFAULT_SEED: u64 = 20250823;

#[derive(Clone, Debug)]
pub struct SuiteResult {
    pub id: &'static str,
    pub description: String,
    pub instances: u64,
    pub passed: bool,
}

fn for_all_maps(
    n_max: usize,
    check: impl Fn(&FunctionalMap) -> bool + Sync,
) -> (u64, bool) {
    let mut instances = 0;
    let mut ok = true;
    for n in 1..=n_max {
        let failures: u64 = (0..map_count(n))
            .into_par_iter()
            .filter(|&i| !check(&map_from_index(n, i)))
            .count() as u64;
        instances += map_count(n);
        ok &= failures == 0;
    }
    (instances, ok)
}

/// Lemma: every equivalence class of size >= 2 consists of maximal elements.
pub fn suite_class_maximality(n_max: usize) -> SuiteResult {
    let (instances, passed) = for_all_maps(n_max, |f| {
        let pre = f.preorder();
        let max = pre.maximal_elements();
        pre.equiv_classes()
            .classes()
            .iter()
            .filter(|c| c.len() >= 2)
            .all(|c| c.is_subset_of(&max))
    });
    SuiteResult {
        id: "class-maximality",
        description: format!("classes of size >= 2 are maximal, all f with n <= {n_max}"),
        instances,
        passed,
    }
}

/// Lemma: every maximal element is rare in the ideal family.
pub fn suite_maximal_rare(n_max: usize) -> SuiteResult {
    let (instances, passed) = for_all_maps(n_max, |f| {
        let ideals = ideals_bruteforce(f);
        let fam = ideals.family();
        f.preorder()
            .maximal_elements()
            .iter()
            .all(|u| fam.is_rare(u).unwrap())
    });
    SuiteResult {
        id: "maximal-rare",
        description: format!("2*deg(u) <= |I| for every maximal u, all f with n <= {n_max}"),
        instances,
        passed,
    }
}

/// Lemma: tracing an element of a non-singleton class preserves the ideal
/// count, satisfies the exact NDS identity, never increases NDS downward,
/// and agrees with the set-level trace.
pub fn suite_trace_identity(n_max: usize) -> SuiteResult {
    let (instances, passed) = for_all_maps(n_max, |f| {
        let part = f.preorder().equiv_classes();
        let fam = ideals_bruteforce(f).into_family();
        let members: Vec<usize> = part
            .classes()
            .iter()
            .filter(|c| c.len() >= 2)
            .flat_map(|c| c.elems())
            .collect();
        members.into_iter().all(|u| {
                let g = trace_class_step(f, u).unwrap();
                let traced = ideals_bruteforce(&g).into_family();
                let identity = fam.nds()
                    == traced.nds() + 2 * fam.degree(u).unwrap() as i64 - fam.len() as i64;
                traced.len() == fam.len()
                    && identity
                    && fam.nds() <= traced.nds()
                    && traced == fam.trace_at(u).unwrap()
            })
    });
    SuiteResult {
        id: "trace-identity",
        description: format!(
            "trace step: count, NDS identity and set equality, all f with n <= {n_max}"
        ),
        instances,
        passed,
    }
}

/// Lemma: deletion identity, exact on every connected rooted-forest map.
pub fn suite_deletion_identity(n_max: usize) -> SuiteResult {
    let (instances, passed) = for_all_maps(n_max, |f| {
        if !is_poset_map(f.images()) || f.components().len() != 1 {
            return true;
        }
        let root = (0..f.ground_size()).find(|&v| f.apply(v) == v).unwrap();
        // delete_root_step verifies the identity internally
        delete_root_step(f, root).is_ok()
    });
    SuiteResult {
        id: "deletion-identity",
        description: format!(
            "root deletion NDS identity on connected forests, n <= {n_max}"
        ),
        instances,
        passed,
    }
}

/// Lemma: a poset on `n` elements has at least `n + 1` ideals.
pub fn suite_ideal_count_lower_bound(n_max: usize) -> SuiteResult {
    let (instances, passed) = for_all_maps(n_max, |f| {
        !is_poset_map(f.images())
            || ideals_bruteforce(f).family().len() >= f.ground_size() + 1
    });
    SuiteResult {
        id: "ideal-count-bound",
        description: format!("|I| >= n + 1 on poset instances, n <= {n_max}"),
        instances,
        passed,
    }
}

fn random_family(rng: &mut impl Rng, n: usize) -> SetFamily {
    let size = rng.gen_range(1..=(1 << n));
    let masks = (0..size).map(|_| rng.gen_range(0..1u64 << n));
    SetFamily::from_masks(n, masks).unwrap()
}

/// Lemma: the union-sum identity on seeded random family pairs.
pub fn suite_union_sum(pairs: u64, n: usize, seed: u64) -> SuiteResult {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut passed = true;
    for _ in 0..pairs {
        let f1 = random_family(&mut rng, n);
        let f2 = random_family(&mut rng, n);
        passed &= union_sum_check(&f1, &f2).unwrap();
    }
    SuiteResult {
        id: "union-sum",
        description: format!("union-sum identity on {pairs} random pairs, n = {n}"),
        instances: pairs,
        passed,
    }
}

/// Lemma: the two-part product identity on every disconnected map.
pub fn suite_product_identity(n_max: usize) -> SuiteResult {
    let (instances, passed) = for_all_maps(n_max, |f| {
        let comps = f.components();
        if comps.len() < 2 {
            return true;
        }
        // left-associated two-way split checked by the certifier path:
        // compare against the direct enumeration on both sides
        let whole = ideals_bruteforce(f).into_family();
        let sub = |mask: u64| {
            let verts: Vec<usize> = (0..f.ground_size())
                .filter(|&v| mask >> v & 1 == 1)
                .collect();
            let local: std::collections::HashMap<usize, usize> =
                verts.iter().enumerate().map(|(i, &v)| (v, i)).collect();
            let g =
                FunctionalMap::new(verts.iter().map(|&v| local[&f.apply(v)]).collect()).unwrap();
            ideals_bruteforce(&g).into_family()
        };
        let left = sub(comps[0].bits());
        let right = sub(comps[1..].iter().fold(0u64, |acc, c| acc | c.bits()));
        whole.nds()
            == right.len() as i64 * left.nds() + left.len() as i64 * right.nds()
    });
    SuiteResult {
        id: "product-identity",
        description: format!("disjoint-union NDS product identity, n <= {n_max}"),
        instances,
        passed,
    }
}

/// Lemma: the singleton-stem closure system of a map equals its ideal family.
pub fn suite_singleton_stem_round_trip(n_max: usize) -> SuiteResult {
    let (instances, passed) = for_all_maps(n_max, |f| {
        let rules = singleton_stems_of_map(f);
        rules.closure_system() == *ideals_bruteforce(f).family()
    });
    SuiteResult {
        id: "singleton-stems",
        description: format!(
            "ideals of f = closure system of its singleton stems, n <= {n_max}"
        ),
        instances,
        passed,
    }
}

/// Mutual reachability coincides with parallelism in the ideal family.
pub fn suite_parallel_equivalence(n_max: usize) -> SuiteResult {
    let (instances, passed) = for_all_maps(n_max, |f| {
        let pre = f.preorder();
        let fam = ideals_bruteforce(f).into_family();
        let n = f.ground_size();
        (0..n).all(|u| {
            (u + 1..n).all(|v| {
                (pre.leq(u, v) && pre.leq(v, u)) == fam.parallel(u, v).unwrap()
            })
        })
    });
    SuiteResult {
        id: "parallel-equivalence",
        description: format!("u ~ v iff u, v parallel in the ideal family, n <= {n_max}"),
        instances,
        passed,
    }
}

/// Forest recursion agrees with the brute-force ideal filter.
pub fn suite_forest_oracle(n_max: usize) -> SuiteResult {
    let (instances, passed) =
        for_all_maps(n_max, |f| ideals_forest(f) == ideals_bruteforce(f));
    SuiteResult {
        id: "forest-oracle",
        description: format!("forest recursion = brute-force filter, n <= {n_max}"),
        instances,
        passed,
    }
}

/// Certification succeeds with a verifiable, nonpositive conclusion.
pub fn suite_certificates(n_max: usize) -> SuiteResult {
    let (instances, passed) = for_all_maps(n_max, |f| {
        certify(f)
            .and_then(|c| verify_certificate(&c.record()))
            .is_ok()
    });
    SuiteResult {
        id: "certificates",
        description: format!("certify and replay every map, n <= {n_max}"),
        instances,
        passed,
    }
}

/// Generated closure systems are intersection-closed and contain `V`;
/// fixpoint closures are minimal containing members; the empty-set test
/// matches membership.  Exhaustive for n <= 3, seeded random at n = 4.
pub fn suite_closure_systems(seed: u64, random_families: u64) -> Result<SuiteResult> {
    let mut instances = 0u64;
    let mut passed = true;
    for n in 1..=3usize {
        let all_rules: Vec<RootedSet> = (0..n)
            .flat_map(|root| {
                (1u64..1 << n).filter_map(move |bits| {
                    if bits >> root & 1 == 0 {
                        Some((bits, root))
                    } else {
                        None
                    }
                })
            })
            .map(|(bits, root)| {
                RootedSet::new(SubsetMask::from_bits(bits, n).unwrap(), root).unwrap()
            })
            .collect();
        for picks in 0u64..1 << all_rules.len() {
            let rules: Vec<RootedSet> = all_rules
                .iter()
                .enumerate()
                .filter(|(i, _)| picks >> i & 1 == 1)
                .map(|(_, r)| *r)
                .collect();
            let rf = RootedFamily::new(n, rules)?;
            passed &= check_closure_system(&rf)?;
            instances += 1;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..random_families {
        let rf = random_rooted_family(&mut rng, 4)?;
        passed &= check_closure_system(&rf)?;
        instances += 1;
    }
    Ok(SuiteResult {
        id: "closure-systems",
        description: format!(
            "closure systems: intersection-closed, fixpoint minimality, empty-set test \
             (exhaustive n <= 3, {random_families} random at n = 4)"
        ),
        instances,
        passed,
    })
}

pub fn random_rooted_family(rng: &mut impl Rng, n: usize) -> Result<RootedFamily> {
    let count = rng.gen_range(0..=2 * n);
    let mut rules = Vec::new();
    for _ in 0..count {
        let root = rng.gen_range(0..n);
        let stem = rng.gen_range(0..1u64 << n) & !(1 << root);
        let rule = RootedSet::new(SubsetMask::from_bits(stem, n)?, root)?;
        if !rules.contains(&rule) {
            rules.push(rule);
        }
    }
    RootedFamily::new(n, rules)
}

fn check_closure_system(rf: &RootedFamily) -> Result<bool> {
    let n = rf.ground_size();
    let system = rf.closure_system();
    if !system.contains(&SubsetMask::full(n)?) {
        return Ok(false);
    }
    for a in system.members() {
        for b in system.members() {
            if !system.contains(&a.intersection(b)) {
                return Ok(false);
            }
        }
    }
    if rf.contains_empty() != system.contains(&SubsetMask::empty(n)?) {
        return Ok(false);
    }
    // closure_of(X) is the smallest member containing X
    for bits in 0u64..1 << n {
        let x = SubsetMask::from_bits(bits, n)?;
        let closed = rf.closure_of(x)?;
        if !system.contains(&closed) || !x.is_subset_of(&closed) {
            return Ok(false);
        }
        let minimal = system
            .members()
            .iter()
            .filter(|m| x.is_subset_of(m))
            .all(|m| closed.is_subset_of(m));
        if !minimal {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The full per-lemma suite at ground size `k` (deletion and count-bound
/// suites run one size larger, as stated in their contracts).
pub fn run_all(k: usize, seed: u64) -> Result<Vec<SuiteResult>> {
    Ok(vec![
        suite_class_maximality(k),
        suite_maximal_rare(k),
        suite_trace_identity(k),
        suite_deletion_identity(k + 1),
        suite_ideal_count_lower_bound(k + 1),
        suite_union_sum(1000, 4, seed),
        suite_product_identity(k),
        suite_singleton_stem_round_trip(k),
        suite_parallel_equivalence(k),
        suite_forest_oracle(k),
        suite_certificates(k),
        suite_closure_systems(seed, 2000)?,
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suites_pass_at_tiny_scale() {
        for r in run_all(3, DEFAULT_SEED).unwrap() {
            assert!(r.passed, "suite {} failed", r.id);
            assert!(r.instances > 0);
        }
    }

    #[test]
    fn suite_result_reports_failures() {
        // sanity that the harness can actually fail: an impossible bound
        let (_, ok) = for_all_maps(2, |f| f.ground_size() > 10);
        assert!(!ok);
    }
}
