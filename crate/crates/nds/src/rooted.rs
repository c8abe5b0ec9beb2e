//! Rooted-set families and the closure systems they generate, plus the
//! correspondence between singleton-stem families and preorders.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::family::{SetFamily, SubsetMask};
use crate::preorder::{FunctionalMap, PreorderRelation};

/// A rule `(stem, root)` with `root` outside the stem: any member of the
/// closure system containing the stem must contain the root.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct RootedSet {
    stem: SubsetMask,
    root: usize,
}

impl RootedSet {
    pub fn new(stem: SubsetMask, root: usize) -> Result<Self> {
        if root >= stem.ground_size() {
            return Err(Error::ElementOutOfRange {
                element: root,
                n: stem.ground_size(),
            });
        }
        if stem.contains(root) {
            return Err(Error::RootInStem { root });
        }
        Ok(RootedSet { stem, root })
    }

    pub fn stem(&self) -> SubsetMask {
        self.stem
    }

    pub fn root(&self) -> usize {
        self.root
    }
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(try_from = "RootedFamilyJson", into = "RootedFamilyJson")]
pub struct RootedFamily {
    n: usize,
    rules: Vec<RootedSet>,
}

impl RootedFamily {
    pub fn new(n: usize, rules: Vec<RootedSet>) -> Result<Self> {
        for r in &rules {
            if r.stem.ground_size() != n {
                return Err(Error::GroundMismatch(r.stem.ground_size(), n));
            }
        }
        let mut keys: Vec<(u64, usize)> = rules.iter().map(|r| (r.stem.bits(), r.root)).collect();
        keys.sort_unstable();
        if let Some(w) = keys.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DuplicateRule { root: w[0].1 });
        }
        Ok(RootedFamily { n, rules })
    }

    pub fn ground_size(&self) -> usize {
        self.n
    }

    pub fn rules(&self) -> &[RootedSet] {
        &self.rules
    }

    /// Does a subset mask satisfy every rule?
    pub fn satisfies(&self, bits: u64) -> bool {
        self.rules.iter().all(|r| {
            let stem = r.stem.bits();
            bits & stem != stem || bits >> r.root & 1 == 1
        })
    }

    /// All subsets satisfying every rule, by filtering the `2^n` masks.
    /// The result is a closure system and always contains `V`.
    pub fn closure_system(&self) -> SetFamily {
        let masks = (0u64..1 << self.n).filter(|&bits| self.satisfies(bits));
        SetFamily::from_masks(self.n, masks).unwrap()
    }

    /// Smallest member of the closure system containing `x`, by iterating
    /// the rules to a fixpoint.
    pub fn closure_of(&self, x: SubsetMask) -> Result<SubsetMask> {
        if x.ground_size() != self.n {
            return Err(Error::GroundMismatch(x.ground_size(), self.n));
        }
        let mut bits = x.bits();
        loop {
            let mut next = bits;
            for r in &self.rules {
                let stem = r.stem.bits();
                if next & stem == stem {
                    next |= 1 << r.root;
                }
            }
            if next == bits {
                return SubsetMask::from_bits(bits, self.n);
            }
            bits = next;
        }
    }

    /// True iff every stem is nonempty, i.e. the empty set satisfies all
    /// rules and belongs to the closure system.
    pub fn contains_empty(&self) -> bool {
        self.rules.iter().all(|r| !r.stem.is_empty())
    }

    /// For singleton stems `({y}, r)` the rules define the preorder closure
    /// of the arcs `r <= y`, and the closure system is its ideal family.
    pub fn singleton_stem_relation(&self) -> Result<PreorderRelation> {
        let arcs = self
            .rules
            .iter()
            .map(|r| {
                if r.stem.len() != 1 {
                    return Err(Error::NonSingletonStem { root: r.root });
                }
                Ok((r.root, r.stem.min_elem().unwrap()))
            })
            .collect::<Result<Vec<_>>>()?;
        PreorderRelation::closure_of_arcs(self.n, &arcs)
    }
}

/// The singleton-stem family `{({f(v)}, v) : f(v) != v}` of a map.
pub fn singleton_stems_of_map(f: &FunctionalMap) -> RootedFamily {
    let n = f.ground_size();
    let rules = (0..n)
        .filter(|&v| f.apply(v) != v)
        .map(|v| {
            RootedSet::new(SubsetMask::from_elems(n, &[f.apply(v)]).unwrap(), v).unwrap()
        })
        .collect();
    RootedFamily::new(n, rules).unwrap()
}

/// A rooted family in which no two rules share a root and every stem is
/// nonempty, as required by the conjecture miner.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct UniqueRootFamily(RootedFamily);

impl UniqueRootFamily {
    pub fn new(family: RootedFamily) -> Result<Self> {
        let mut roots: Vec<usize> = family.rules.iter().map(|r| r.root).collect();
        roots.sort_unstable();
        if let Some(w) = roots.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::SharedRoot(w[0]));
        }
        if let Some(r) = family.rules.iter().find(|r| r.stem.is_empty()) {
            return Err(Error::EmptyStem { root: r.root });
        }
        Ok(UniqueRootFamily(family))
    }

    pub fn family(&self) -> &RootedFamily {
        &self.0
    }
}

#[derive(Serialize, Deserialize)]
struct RuleJson {
    stem: Vec<usize>,
    root: usize,
}

#[derive(Serialize, Deserialize)]
struct RootedFamilyJson {
    n: usize,
    rules: Vec<RuleJson>,
}

impl TryFrom<RootedFamilyJson> for RootedFamily {
    type Error = Error;

    fn try_from(j: RootedFamilyJson) -> Result<Self> {
        let rules = j
            .rules
            .iter()
            .map(|r| RootedSet::new(SubsetMask::from_elems(j.n, &r.stem)?, r.root))
            .collect::<Result<Vec<_>>>()?;
        RootedFamily::new(j.n, rules)
    }
}

impl From<RootedFamily> for RootedFamilyJson {
    fn from(f: RootedFamily) -> Self {
        RootedFamilyJson {
            n: f.n,
            rules: f
                .rules
                .iter()
                .map(|r| RuleJson {
                    stem: r.stem.elems(),
                    root: r.root,
                })
                .collect(),
        }
    }
}
