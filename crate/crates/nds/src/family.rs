//! Ground sets, subset masks and set families, together with the degree,
//! NDS, rarity, trace and parallelism statistics.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One mask word per subset; ground sets larger than this are rejected.
pub const MAX_GROUND: usize = 64;

/// A subset of `[0, n)` packed into a single word.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SubsetMask {
    bits: u64,
    n: usize,
}

impl SubsetMask {
    pub fn empty(n: usize) -> Result<Self> {
        if n > MAX_GROUND {
            return Err(Error::GroundTooLarge(n));
        }
        Ok(SubsetMask { bits: 0, n })
    }

    pub fn full(n: usize) -> Result<Self> {
        Ok(SubsetMask {
            bits: full_bits(n),
            n,
        })
    }

    pub fn from_bits(bits: u64, n: usize) -> Result<Self> {
        if n > MAX_GROUND {
            return Err(Error::GroundTooLarge(n));
        }
        if bits & !full_bits(n) != 0 {
            return Err(Error::ElementOutOfRange {
                element: (63 - bits.leading_zeros()) as usize,
                n,
            });
        }
        Ok(SubsetMask { bits, n })
    }

    pub fn from_elems(n: usize, elems: &[usize]) -> Result<Self> {
        let mut mask = SubsetMask::empty(n)?;
        for &e in elems {
            if e >= n {
                return Err(Error::ElementOutOfRange { element: e, n });
            }
            mask.bits |= 1 << e;
        }
        Ok(mask)
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    pub fn ground_size(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.bits.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.bits == 0
    }

    pub fn contains(&self, e: usize) -> bool {
        e < self.n && self.bits >> e & 1 == 1
    }

    pub fn is_subset_of(&self, other: &SubsetMask) -> bool {
        self.bits & !other.bits == 0
    }

    pub fn union(&self, other: &SubsetMask) -> SubsetMask {
        SubsetMask {
            bits: self.bits | other.bits,
            n: self.n,
        }
    }

    pub fn intersection(&self, other: &SubsetMask) -> SubsetMask {
        SubsetMask {
            bits: self.bits & other.bits,
            n: self.n,
        }
    }

    pub fn with(&self, e: usize) -> SubsetMask {
        SubsetMask {
            bits: self.bits | 1 << e,
            n: self.n,
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.n).filter(move |&e| self.bits >> e & 1 == 1)
    }

    pub fn elems(&self) -> Vec<usize> {
        self.iter().collect()
    }

    pub fn min_elem(&self) -> Option<usize> {
        if self.bits == 0 {
            None
        } else {
            Some(self.bits.trailing_zeros() as usize)
        }
    }

    /// Delete `x` and renumber every element above it downward by one.
    pub fn remove_and_shift(&self, x: usize) -> Result<SubsetMask> {
        if x >= self.n {
            return Err(Error::ElementOutOfRange { element: x, n: self.n });
        }
        let low = self.bits & ((1u64 << x) - 1);
        let high = self.bits.checked_shr(x as u32 + 1).unwrap_or(0) << x;
        Ok(SubsetMask {
            bits: low | high,
            n: self.n - 1,
        })
    }
}

fn full_bits(n: usize) -> u64 {
    if n == 0 {
        0
    } else {
        u64::MAX >> (64 - n)
    }
}

impl fmt::Debug for SubsetMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, e) in self.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, "}}")
    }
}

/// A family of distinct subsets of `[0, n)`, kept sorted by mask value.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(try_from = "SetFamilyJson", into = "SetFamilyJson")]
pub struct SetFamily {
    n: usize,
    members: Vec<SubsetMask>,
}

impl SetFamily {
    /// Build a family from raw masks; duplicates are merged, members sorted.
    pub fn from_masks<I: IntoIterator<Item = u64>>(n: usize, masks: I) -> Result<Self> {
        let mut members = masks
            .into_iter()
            .map(|m| SubsetMask::from_bits(m, n))
            .collect::<Result<Vec<_>>>()?;
        members.sort_unstable();
        members.dedup();
        Ok(SetFamily { n, members })
    }

    pub fn from_subsets(n: usize, subsets: Vec<SubsetMask>) -> Result<Self> {
        for s in &subsets {
            if s.ground_size() != n {
                return Err(Error::GroundMismatch(s.ground_size(), n));
            }
        }
        Self::from_masks(n, subsets.into_iter().map(|s| s.bits()))
    }

    pub fn ground_size(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn members(&self) -> &[SubsetMask] {
        &self.members
    }

    pub fn contains(&self, mask: &SubsetMask) -> bool {
        self.members.binary_search(mask).is_ok()
    }

    /// Number of members containing `u`.
    pub fn degree(&self, u: usize) -> Result<usize> {
        if u >= self.n {
            return Err(Error::ElementOutOfRange { element: u, n: self.n });
        }
        Ok(self.members.iter().filter(|m| m.contains(u)).count())
    }

    pub fn degrees(&self) -> Vec<usize> {
        (0..self.n)
            .map(|u| self.members.iter().filter(|m| m.contains(u)).count())
            .collect()
    }

    /// Sum of member sizes.
    pub fn total_size(&self) -> u64 {
        self.members.iter().map(|m| m.len() as u64).sum()
    }

    /// Normalized degree sum: `2 * sum |F| - |family| * n`, exact.
    pub fn nds(&self) -> i64 {
        2 * self.total_size() as i64 - (self.members.len() * self.n) as i64
    }

    /// `u` appears in at most half of the members.
    pub fn is_rare(&self, u: usize) -> Result<bool> {
        Ok(2 * self.degree(u)? <= self.members.len())
    }

    pub fn is_average_rare(&self) -> bool {
        self.nds() <= 0
    }

    /// `{F \ {x} : F in family}` on ground size `n - 1`, deduplicated.
    pub fn trace_at(&self, x: usize) -> Result<SetFamily> {
        if x >= self.n {
            return Err(Error::ElementOutOfRange { element: x, n: self.n });
        }
        let traced = self
            .members
            .iter()
            .map(|m| m.remove_and_shift(x).map(|s| s.bits()))
            .collect::<Result<Vec<_>>>()?;
        SetFamily::from_masks(self.n - 1, traced)
    }

    /// `u` and `v` are contained in exactly the same members.
    pub fn parallel(&self, u: usize, v: usize) -> Result<bool> {
        if u == v {
            return Err(Error::EqualElements);
        }
        if u >= self.n {
            return Err(Error::ElementOutOfRange { element: u, n: self.n });
        }
        if v >= self.n {
            return Err(Error::ElementOutOfRange { element: v, n: self.n });
        }
        Ok(self.members.iter().all(|m| m.contains(u) == m.contains(v)))
    }
}

#[derive(Serialize, Deserialize)]
struct SetFamilyJson {
    n: usize,
    sets: Vec<Vec<usize>>,
}

impl TryFrom<SetFamilyJson> for SetFamily {
    type Error = Error;

    fn try_from(j: SetFamilyJson) -> Result<Self> {
        let mut masks = Vec::with_capacity(j.sets.len());
        for set in &j.sets {
            if !set.windows(2).all(|w| w[0] < w[1]) {
                return Err(Error::UnsortedSet);
            }
            masks.push(SubsetMask::from_elems(j.n, set)?.bits());
        }
        let family = SetFamily::from_masks(j.n, masks.iter().copied())?;
        if family.len() != masks.len() {
            return Err(Error::DuplicateSet);
        }
        Ok(family)
    }
}

impl From<SetFamily> for SetFamilyJson {
    fn from(f: SetFamily) -> Self {
        SetFamilyJson {
            n: f.n,
            sets: f.members.iter().map(|m| m.elems()).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    // {∅,{a},{a,b}} on two elements
    fn chain2() -> SetFamily {
        SetFamily::from_masks(2, [0b00, 0b01, 0b11]).unwrap()
    }

    // {∅,{a},{a,b,c}} on three elements
    fn preorder3() -> SetFamily {
        SetFamily::from_masks(3, [0b000, 0b001, 0b111]).unwrap()
    }

    // {∅,{a},{a,b},{a,c},{a,b,c}} on three elements
    fn two_covers() -> SetFamily {
        SetFamily::from_masks(3, [0b000, 0b001, 0b011, 0b101, 0b111]).unwrap()
    }

    #[test]
    fn degree_examples() {
        assert_eq!(chain2().degree(0).unwrap(), 2);
        let empty_only = SetFamily::from_masks(2, [0]).unwrap();
        assert_eq!(empty_only.degree(0).unwrap(), 0);
        assert_eq!(empty_only.degree(1).unwrap(), 0);
        let all3 = SetFamily::from_masks(3, 0..8).unwrap();
        assert_eq!(all3.degree(1).unwrap(), 4);
        assert!(matches!(
            chain2().degree(2),
            Err(Error::ElementOutOfRange { .. })
        ));
    }

    #[test]
    fn nds_examples() {
        assert_eq!(chain2().nds(), 0);
        assert_eq!(preorder3().nds(), -1);
        assert_eq!(two_covers().nds(), 1);
    }

    #[test]
    fn rarity_examples() {
        let f = two_covers();
        assert!(!f.is_rare(0).unwrap());
        assert!(f.is_rare(1).unwrap());
        let tiny = SetFamily::from_masks(2, [0b00, 0b11]).unwrap();
        assert!(tiny.is_rare(0).unwrap());
        assert!(tiny.is_rare(1).unwrap());
    }

    #[test]
    fn average_rare_examples() {
        assert!(chain2().is_average_rare());
        assert!(!two_covers().is_average_rare());
        let zero_ground = SetFamily::from_masks(0, [0]).unwrap();
        assert!(zero_ground.is_average_rare());
        assert_eq!(zero_ground.nds(), 0);
    }

    #[test]
    fn trace_examples() {
        let t = chain2().trace_at(1).unwrap();
        assert_eq!(t, SetFamily::from_masks(1, [0b0, 0b1]).unwrap());
        assert_eq!(t.len(), 2);

        let t = preorder3().trace_at(2).unwrap();
        assert_eq!(t, SetFamily::from_masks(2, [0b00, 0b01, 0b11]).unwrap());
        assert_eq!(t.len(), 3);

        let e = SetFamily::from_masks(1, [0]).unwrap();
        assert_eq!(e.trace_at(0).unwrap(), SetFamily::from_masks(0, [0]).unwrap());
    }

    #[test]
    fn parallel_examples() {
        assert!(preorder3().parallel(1, 2).unwrap());
        assert!(!chain2().parallel(0, 1).unwrap());
        let all3 = SetFamily::from_masks(3, 0..8).unwrap();
        for u in 0..3 {
            for v in 0..3 {
                if u != v {
                    assert!(!all3.parallel(u, v).unwrap());
                }
            }
        }
        assert_eq!(chain2().parallel(1, 1), Err(Error::EqualElements));
    }

    #[test]
    fn double_counting_identity() {
        for f in [chain2(), preorder3(), two_covers()] {
            let via_degrees: i64 =
                f.degrees().iter().map(|&d| 2 * d as i64).sum::<i64>()
                    - (f.len() * f.ground_size()) as i64;
            assert_eq!(via_degrees, f.nds());
        }
    }

    #[test]
    fn json_round_trip() {
        let f = two_covers();
        let j = serde_json::to_string(&f).unwrap();
        assert_eq!(
            j,
            r#"{"n":3,"sets":[[],[0],[0,1],[0,2],[0,1,2]]}"#
        );
        let back: SetFamily = serde_json::from_str(&j).unwrap();
        assert_eq!(back, f);
    }

    #[test]
    fn json_rejects_bad_input() {
        assert!(serde_json::from_str::<SetFamily>(r#"{"n":2,"sets":[[1,0]]}"#).is_err());
        assert!(serde_json::from_str::<SetFamily>(r#"{"n":2,"sets":[[2]]}"#).is_err());
        assert!(serde_json::from_str::<SetFamily>(r#"{"n":2,"sets":[[0],[0]]}"#).is_err());
    }
}
