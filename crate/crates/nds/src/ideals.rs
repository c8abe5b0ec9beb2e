//! Enumeration of the order-ideal family of a functional preorder: a
//! brute-force filter over all masks, and a structural recursion over the
//! rooted-forest decomposition.

use crate::error::{Error, Result};
use crate::family::SetFamily;
use crate::preorder::FunctionalMap;

/// The ideal family of a functional preorder, tagged with its source map.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct IdealFamily {
    family: SetFamily,
    map: FunctionalMap,
}

impl IdealFamily {
    pub fn family(&self) -> &SetFamily {
        &self.family
    }

    pub fn map(&self) -> &FunctionalMap {
        &self.map
    }

    pub fn into_family(self) -> SetFamily {
        self.family
    }
}

/// Filter all `2^n` masks by downward closure under the preorder of `f`.
pub fn ideals_bruteforce(f: &FunctionalMap) -> IdealFamily {
    let n = f.ground_size();
    let down = f.preorder().down_sets();
    let masks = (0u64..1 << n).filter(|&bits| {
        (0..n).all(|x| bits >> x & 1 == 0 || down[x] & !bits == 0)
    });
    IdealFamily {
        family: SetFamily::from_masks(n, masks).unwrap(),
        map: f.clone(),
    }
}

/// Same family as [`ideals_bruteforce`], by forest recursion.  Non-poset
/// inputs are quotiented to a poset first and each class vertex is
/// re-expanded to its full class afterwards.
pub fn ideals_forest(f: &FunctionalMap) -> IdealFamily {
    let n = f.ground_size();
    let part = f.preorder().equiv_classes();
    let masks = if part.class_count() == n {
        poset_ideal_masks(f)
    } else {
        let q = f.quotient(&part).unwrap();
        let class_bits: Vec<u64> = part.classes().iter().map(|c| c.bits()).collect();
        poset_ideal_masks(&q)
            .into_iter()
            .map(|qmask| {
                (0..class_bits.len())
                    .filter(|&i| qmask >> i & 1 == 1)
                    .fold(0u64, |acc, i| acc | class_bits[i])
            })
            .collect()
    };
    IdealFamily {
        family: SetFamily::from_masks(n, masks).unwrap(),
        map: f.clone(),
    }
}

/// Forest recursion for a poset input only; errors on a non-poset map.
pub fn ideals_forest_poset(f: &FunctionalMap) -> Result<IdealFamily> {
    if let Some((u, v)) = f.preorder().poset_violation() {
        return Err(Error::NotAPoset { u, v });
    }
    Ok(IdealFamily {
        family: SetFamily::from_masks(f.ground_size(), poset_ideal_masks(f)).unwrap(),
        map: f.clone(),
    })
}

/// `|I(V, <=)|` without materializing the members.
pub fn count_ideals(f: &FunctionalMap) -> u64 {
    let (count, _) = weighted_ideal_stats(f);
    count as u64
}

/// NDS of the ideal family of `f`, via the counting recursion.
pub fn nds_of_map(f: &FunctionalMap) -> i64 {
    let (count, weighted_sum) = weighted_ideal_stats(f);
    (2 * weighted_sum - count * f.ground_size() as i128) as i64
}

/// `(|I|, sum of |I| over ideals)` where sizes are measured on the original
/// ground set.  Works through the quotient for non-poset inputs, weighting
/// each class vertex by its class size.
fn weighted_ideal_stats(f: &FunctionalMap) -> (i128, i128) {
    let n = f.ground_size();
    let part = f.preorder().equiv_classes();
    if part.class_count() == n {
        let mut g = f.images().to_vec();
        let weights = vec![1u64; n];
        stats_rec(full_mask(n), &mut g, &weights)
    } else {
        let q = f.quotient(&part).unwrap();
        let weights: Vec<u64> = part.classes().iter().map(|c| c.len() as u64).collect();
        let mut g = q.images().to_vec();
        stats_rec(full_mask(part.class_count()), &mut g, &weights)
    }
}

fn full_mask(n: usize) -> u64 {
    if n == 0 {
        0
    } else {
        u64::MAX >> (64 - n)
    }
}

/// Ideal masks of a poset map, sorted ascending.
fn poset_ideal_masks(f: &FunctionalMap) -> Vec<u64> {
    let mut g = f.images().to_vec();
    let mut masks = ideal_masks_rec(full_mask(f.ground_size()), &mut g);
    masks.sort_unstable();
    masks
}

/// Components of the restriction of `g` to `active`, by smallest member.
fn components_within(active: u64, g: &[usize]) -> Vec<u64> {
    let mut remaining = active;
    let mut comps: Vec<u64> = Vec::new();
    while remaining != 0 {
        let seed = remaining.trailing_zeros() as usize;
        // grow the component by alternating image/preimage sweeps
        let mut comp = 1u64 << seed;
        loop {
            let mut next = comp;
            let mut m = remaining;
            while m != 0 {
                let v = m.trailing_zeros() as usize;
                m &= m - 1;
                if g[v] != v && (comp >> v & 1 == 1 || comp >> g[v] & 1 == 1) {
                    next |= 1 << v | 1 << g[v];
                }
            }
            if next == comp {
                break;
            }
            comp = next;
        }
        comps.push(comp);
        remaining &= !comp;
    }
    comps
}

/// The unique fixed point of `g` within a connected component mask.
fn root_of_component(comp: u64, g: &[usize]) -> usize {
    let mut m = comp;
    while m != 0 {
        let v = m.trailing_zeros() as usize;
        if g[v] == v {
            return v;
        }
        m &= m - 1;
    }
    unreachable!("connected poset component has a fixed point")
}

/// Redirect everything that pointed at `root` to itself.
fn delete_root(comp: u64, root: usize, g: &mut [usize]) {
    let mut m = comp & !(1 << root);
    while m != 0 {
        let v = m.trailing_zeros() as usize;
        m &= m - 1;
        if g[v] == root {
            g[v] = v;
        }
    }
}

/// ideals(disjoint union) = all unions of one ideal per component;
/// ideals(component C) = {C} ∪ ideals(C minus its root).
fn ideal_masks_rec(active: u64, g: &mut Vec<usize>) -> Vec<u64> {
    let mut result: Vec<u64> = vec![0];
    for comp in components_within(active, g) {
        let root = root_of_component(comp, g);
        delete_root(comp, root, g);
        let mut comp_ideals = ideal_masks_rec(comp & !(1 << root), g);
        comp_ideals.push(comp);
        result = result
            .iter()
            .flat_map(|&a| comp_ideals.iter().map(move |&b| a | b))
            .collect();
    }
    result
}

/// Count-and-size recursion mirroring `ideal_masks_rec`.
fn stats_rec(active: u64, g: &mut Vec<usize>, weights: &[u64]) -> (i128, i128) {
    let mut count: i128 = 1;
    let mut sum: i128 = 0;
    for comp in components_within(active, g) {
        let root = root_of_component(comp, g);
        delete_root(comp, root, g);
        let (sub_count, sub_sum) = stats_rec(comp & !(1 << root), g, weights);
        let comp_weight: i128 = {
            let mut w = 0i128;
            let mut m = comp;
            while m != 0 {
                let v = m.trailing_zeros() as usize;
                m &= m - 1;
                w += weights[v] as i128;
            }
            w
        };
        let (comp_count, comp_sum) = (sub_count + 1, sub_sum + comp_weight);
        // product rule for the disjoint union accumulated so far
        sum = comp_count * sum + count * comp_sum;
        count *= comp_count;
    }
    (count, sum)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::SubsetMask;

    fn map(images: &[usize]) -> FunctionalMap {
        FunctionalMap::new(images.to_vec()).unwrap()
    }

    #[test]
    fn bruteforce_examples() {
        assert_eq!(
            ideals_bruteforce(&map(&[1, 1])).family(),
            &SetFamily::from_masks(2, [0b00, 0b01, 0b11]).unwrap()
        );
        assert_eq!(
            ideals_bruteforce(&map(&[1, 2, 1])).family(),
            &SetFamily::from_masks(3, [0b000, 0b001, 0b111]).unwrap()
        );
        assert_eq!(ideals_bruteforce(&map(&[0, 1, 2])).family().len(), 8);
    }

    #[test]
    fn forest_examples() {
        let chain3 = map(&[1, 2, 2]);
        assert_eq!(
            ideals_forest(&chain3).family(),
            &SetFamily::from_masks(3, [0b000, 0b001, 0b011, 0b111]).unwrap()
        );

        let star = map(&[2, 2, 2]);
        let ideals = ideals_forest(&star);
        assert_eq!(ideals.family().len(), 5);
        assert_eq!(ideals.family().nds(), -1);
        assert_eq!(ideals.family(), ideals_bruteforce(&star).family());

        assert_eq!(
            ideals_forest(&map(&[0])).family(),
            &SetFamily::from_masks(1, [0b0, 0b1]).unwrap()
        );
    }

    #[test]
    fn forest_poset_rejects_preorders() {
        assert!(matches!(
            ideals_forest_poset(&map(&[1, 2, 1])),
            Err(Error::NotAPoset { u: 1, v: 2 })
        ));
        assert!(ideals_forest_poset(&map(&[1, 1])).is_ok());
    }

    #[test]
    fn count_examples() {
        for n in 1..=6 {
            let chain: Vec<usize> = (0..n).map(|v| (v + 1).min(n - 1)).collect();
            assert_eq!(count_ideals(&map(&chain)), n as u64 + 1);
        }
        assert_eq!(count_ideals(&map(&[0, 1, 2, 3])), 16);
        assert_eq!(count_ideals(&map(&[1, 2, 1])), 3);
    }

    #[test]
    fn nds_fast_path_matches_family() {
        assert_eq!(nds_of_map(&map(&[1, 1])), 0);
        assert_eq!(nds_of_map(&map(&[1, 2, 1])), -1);
        assert_eq!(nds_of_map(&map(&[2, 2, 2])), -1);
        assert_eq!(nds_of_map(&map(&[0, 1, 2])), 0);
    }

    #[test]
    fn members_always_include_bounds() {
        for f in [map(&[1, 1]), map(&[1, 2, 1]), map(&[2, 2, 2, 1])] {
            let fam = ideals_forest(&f);
            let n = f.ground_size();
            assert!(fam.family().contains(&SubsetMask::empty(n).unwrap()));
            assert!(fam.family().contains(&SubsetMask::full(n).unwrap()));
        }
    }
}
