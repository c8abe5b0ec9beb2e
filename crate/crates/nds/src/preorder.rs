//! The preorder induced by a function `f: V -> V`: reachability along
//! iterates, equivalence classes, maximal elements, poset tests, weak
//! components, Hasse covers and quotient contraction.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::family::{SubsetMask, MAX_GROUND};

/// A total function on `[0, n)`, stored as the image array.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct FunctionalMap {
    images: Vec<usize>,
}

impl FunctionalMap {
    pub fn new(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        if n > MAX_GROUND {
            return Err(Error::GroundTooLarge(n));
        }
        for &w in &images {
            if w >= n {
                return Err(Error::ElementOutOfRange { element: w, n });
            }
        }
        Ok(FunctionalMap { images })
    }

    pub fn identity(n: usize) -> Result<Self> {
        FunctionalMap::new((0..n).collect())
    }

    pub fn ground_size(&self) -> usize {
        self.images.len()
    }

    pub fn apply(&self, v: usize) -> usize {
        self.images[v]
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    /// Reachability: `leq(v, w)` iff some iterate `f^k(v) = w`.
    /// Each orbit is rho-shaped, so walking at most `n` steps suffices.
    pub fn preorder(&self) -> PreorderRelation {
        let n = self.ground_size();
        let mut rows = vec![0u64; n];
        for v in 0..n {
            let mut seen = 0u64;
            let mut w = v;
            while seen >> w & 1 == 0 {
                seen |= 1 << w;
                w = self.images[w];
            }
            rows[v] = seen;
        }
        PreorderRelation { n, rows }
    }

    /// Weakly-connected components of the graph `{v -> f(v) : f(v) != v}`,
    /// ordered by smallest member.
    pub fn components(&self) -> Vec<SubsetMask> {
        let n = self.ground_size();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut [usize], v: usize) -> usize {
            let mut r = v;
            while parent[r] != r {
                r = parent[r];
            }
            let mut v = v;
            while parent[v] != r {
                let next = parent[v];
                parent[v] = r;
                v = next;
            }
            r
        }
        for v in 0..n {
            let w = self.images[v];
            if w != v {
                let (a, b) = (find(&mut parent, v), find(&mut parent, w));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
        let mut masks = vec![0u64; n];
        for v in 0..n {
            masks[find(&mut parent, v)] |= 1 << v;
        }
        (0..n)
            .filter(|&r| masks[r] != 0)
            .map(|r| SubsetMask::from_bits(masks[r], n).unwrap())
            .collect()
    }

    /// Cover pairs `(v, f(v))` for `f(v) != v`; defined for posets only.
    pub fn hasse_covers(&self) -> Result<Vec<(usize, usize)>> {
        let pre = self.preorder();
        if let Some((u, v)) = pre.poset_violation() {
            return Err(Error::NotAPoset { u, v });
        }
        Ok((0..self.ground_size())
            .filter(|&v| self.images[v] != v)
            .map(|v| (v, self.images[v]))
            .collect())
    }

    /// Contract every equivalence class of `part` to a single vertex.
    /// Classes of size >= 2 become fixed points.
    pub fn quotient(&self, part: &Partition) -> Result<FunctionalMap> {
        if *part != self.preorder().equiv_classes() {
            return Err(Error::PartitionMismatch);
        }
        let images = part
            .classes()
            .iter()
            .map(|class| {
                if class.len() >= 2 {
                    part.class_of(class.min_elem().unwrap())
                } else {
                    part.class_of(self.images[class.min_elem().unwrap()])
                }
            })
            .collect();
        FunctionalMap::new(images)
    }
}

impl FromStr for FunctionalMap {
    type Err = Error;

    /// Parses the one-line text form, e.g. `1 1`.
    fn from_str(s: &str) -> Result<Self> {
        let images = s
            .split_whitespace()
            .map(|tok| {
                tok.parse::<usize>()
                    .map_err(|_| Error::Parameter(format!("bad element index {tok:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        FunctionalMap::new(images)
    }
}

impl fmt::Display for FunctionalMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, w) in self.images.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{w}")?;
        }
        Ok(())
    }
}

/// Reflexive-transitive relation over `[0, n)`; row `v` is the up-set of `v`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PreorderRelation {
    n: usize,
    rows: Vec<u64>,
}

impl PreorderRelation {
    /// Reflexive-transitive closure of a set of arcs `lo <= hi`.
    pub fn closure_of_arcs(n: usize, arcs: &[(usize, usize)]) -> Result<Self> {
        if n > MAX_GROUND {
            return Err(Error::GroundTooLarge(n));
        }
        let mut rows = vec![0u64; n];
        for v in 0..n {
            rows[v] = 1 << v;
        }
        for &(lo, hi) in arcs {
            for &e in &[lo, hi] {
                if e >= n {
                    return Err(Error::ElementOutOfRange { element: e, n });
                }
            }
            rows[lo] |= 1 << hi;
        }
        // Warshall over the row masks
        for k in 0..n {
            for v in 0..n {
                if rows[v] >> k & 1 == 1 {
                    rows[v] |= rows[k];
                }
            }
        }
        Ok(PreorderRelation { n, rows })
    }

    pub fn ground_size(&self) -> usize {
        self.n
    }

    pub fn leq(&self, v: usize, w: usize) -> bool {
        self.rows[v] >> w & 1 == 1
    }

    pub fn up_set(&self, v: usize) -> u64 {
        self.rows[v]
    }

    /// `{y : y <= x}` as a mask, for every `x`.
    pub fn down_sets(&self) -> Vec<u64> {
        let mut down = vec![0u64; self.n];
        for v in 0..self.n {
            for w in 0..self.n {
                if self.leq(v, w) {
                    down[w] |= 1 << v;
                }
            }
        }
        down
    }

    /// Equivalence classes of mutual reachability, ordered by smallest member.
    pub fn equiv_classes(&self) -> Partition {
        let mut class_of = vec![usize::MAX; self.n];
        let mut classes: Vec<SubsetMask> = Vec::new();
        for v in 0..self.n {
            if class_of[v] != usize::MAX {
                continue;
            }
            let id = classes.len();
            let mut mask = 0u64;
            for w in v..self.n {
                if self.leq(v, w) && self.leq(w, v) {
                    class_of[w] = id;
                    mask |= 1 << w;
                }
            }
            classes.push(SubsetMask::from_bits(mask, self.n).unwrap());
        }
        Partition { class_of, classes }
    }

    /// Mask of all maximal elements (`u <= v` implies `v <= u`).
    pub fn maximal_elements(&self) -> SubsetMask {
        let mut mask = 0u64;
        for u in 0..self.n {
            if (0..self.n).all(|v| !self.leq(u, v) || self.leq(v, u)) {
                mask |= 1 << u;
            }
        }
        SubsetMask::from_bits(mask, self.n).unwrap()
    }

    pub fn is_poset(&self) -> bool {
        self.poset_violation().is_none()
    }

    /// Smallest pair of distinct mutually-comparable elements, if any.
    pub fn poset_violation(&self) -> Option<(usize, usize)> {
        for u in 0..self.n {
            for v in u + 1..self.n {
                if self.leq(u, v) && self.leq(v, u) {
                    return Some((u, v));
                }
            }
        }
        None
    }
}

/// Partition of `[0, n)` into equivalence classes.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Partition {
    class_of: Vec<usize>,
    classes: Vec<SubsetMask>,
}

impl Partition {
    pub fn ground_size(&self) -> usize {
        self.class_of.len()
    }

    pub fn class_count(&self) -> usize {
        self.classes.len()
    }

    pub fn class_of(&self, v: usize) -> usize {
        self.class_of[v]
    }

    pub fn classes(&self) -> &[SubsetMask] {
        &self.classes
    }
}
