//! Exhaustive desk-scale searches: the main-theorem scan over all maps
//! `f: V -> V`, and the conjecture miner over unique-root rooted families.
//! Both are embarrassingly parallel over the instance index space; reports
//! merge by max (ties to the smallest index) and concatenation, so the
//! final report does not depend on the worker count.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::family::SubsetMask;
use crate::ideals::nds_of_map;
use crate::preorder::FunctionalMap;
use crate::rooted::{RootedFamily, RootedSet, UniqueRootFamily};

/// Largest ground size accepted by the enumerators; `n^n` must fit an index
/// word, and anything near this bound is far beyond desk scale anyway.
pub const MAX_ENUM_GROUND: usize = 15;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchReport {
    pub n: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_stem: Option<usize>,
    pub instances_scanned: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub distinct_up_to_iso: Option<u64>,
    pub max_nds: i64,
    pub max_witness: Value,
    pub counterexamples: Vec<Counterexample>,
    pub wall_time: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Counterexample {
    pub index: String,
    pub witness: Value,
    pub nds: i64,
}

impl SearchReport {
    pub fn found_counterexample(&self) -> bool {
        !self.counterexamples.is_empty()
    }
}

#[derive(Clone, Debug, Default)]
pub struct ScanOptions {
    pub canonical_only: bool,
    pub posets_only: bool,
    pub jobs: Option<usize>,
}

#[derive(Clone, Debug, Default)]
pub struct MineOptions {
    pub exactly_one: bool,
    pub jobs: Option<usize>,
    pub cursor: Option<PathBuf>,
    /// Instances between checkpoints when a cursor path is set.
    pub checkpoint_every: u64,
}

/// Merge-only accumulator; commutative, so reduce order never matters.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
struct Accumulator {
    scanned: u64,
    /// `(nds, index)` of the maximum, ties broken by the smaller index.
    best: Option<(i64, u64)>,
    counterexamples: Vec<(u64, i64)>,
}

impl Accumulator {
    fn record(&mut self, index: u64, nds: i64) {
        self.scanned += 1;
        match self.best {
            Some((b, bi)) if nds < b || (nds == b && index >= bi) => {}
            _ => self.best = Some((nds, index)),
        }
        if nds > 0 {
            self.counterexamples.push((index, nds));
        }
    }

    fn merge(mut self, other: Accumulator) -> Accumulator {
        self.scanned += other.scanned;
        self.best = match (self.best, other.best) {
            (a, None) => a,
            (None, b) => b,
            (Some((a, ai)), Some((b, bi))) => {
                if b > a || (b == a && bi < ai) {
                    Some((b, bi))
                } else {
                    Some((a, ai))
                }
            }
        };
        self.counterexamples.extend(other.counterexamples);
        self
    }
}

fn run_pool<T: Send>(jobs: Option<usize>, body: impl FnOnce() -> T + Send) -> Result<T> {
    match jobs {
        None => Ok(body()),
        Some(j) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(j.max(1))
                .build()
                .map_err(|e| Error::Parameter(format!("thread pool: {e}")))?;
            Ok(pool.install(body))
        }
    }
}

// ---------------------------------------------------------------------------
// map enumeration

fn check_enum_ground(n: usize) -> Result<()> {
    if n < 1 || n > MAX_ENUM_GROUND {
        return Err(Error::Parameter(format!(
            "ground size must be in 1..={MAX_ENUM_GROUND}, got {n}"
        )));
    }
    Ok(())
}

pub fn map_count(n: usize) -> u64 {
    (n as u64).pow(n as u32)
}

/// Decode index `i` in `[0, n^n)` into image digits, most significant first,
/// so numeric index order equals lexicographic order on the image array.
pub fn map_from_index(n: usize, i: u64) -> FunctionalMap {
    let mut images = vec![0usize; n];
    let mut i = i;
    for v in (0..n).rev() {
        images[v] = (i % n as u64) as usize;
        i /= n as u64;
    }
    FunctionalMap::new(images).unwrap()
}

fn map_to_index(images: &[usize]) -> u64 {
    let n = images.len() as u64;
    images.iter().fold(0u64, |acc, &w| acc * n + w as u64)
}

/// Is the image array minimal over all conjugations by permutations?
pub fn is_canonical(images: &[usize]) -> bool {
    let n = images.len();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut conj = vec![0usize; n];
    loop {
        for v in 0..n {
            conj[perm[v]] = perm[images[v]];
        }
        if conj[..] < images[..] {
            return false;
        }
        if !next_permutation(&mut perm) {
            return true;
        }
    }
}

/// Smallest conjugate of the map, used as its canonical form.
pub fn canonical_form(images: &[usize]) -> Vec<usize> {
    let n = images.len();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut best = images.to_vec();
    let mut conj = vec![0usize; n];
    loop {
        for v in 0..n {
            conj[perm[v]] = perm[images[v]];
        }
        if conj[..] < best[..] {
            best.copy_from_slice(&conj);
        }
        if !next_permutation(&mut perm) {
            return best;
        }
    }
}

fn next_permutation(perm: &mut [usize]) -> bool {
    let n = perm.len();
    if n < 2 {
        return false;
    }
    let Some(i) = (0..n - 1).rev().find(|&i| perm[i] < perm[i + 1]) else {
        return false;
    };
    let j = (i + 1..n).rev().find(|&j| perm[j] > perm[i]).unwrap();
    perm.swap(i, j);
    perm[i + 1..].reverse();
    true
}

/// All `n^n` maps in index order, one representative per relabeling orbit
/// when `canonical_only` is set.
pub fn enumerate_maps(
    n: usize,
    canonical_only: bool,
) -> Result<impl Iterator<Item = FunctionalMap>> {
    check_enum_ground(n)?;
    Ok((0..map_count(n))
        .map(move |i| map_from_index(n, i))
        .filter(move |f| !canonical_only || is_canonical(f.images())))
}

/// Every cycle of `f` is a fixed point, i.e. the preorder is a poset.
pub fn is_poset_map(images: &[usize]) -> bool {
    let n = images.len();
    (0..n).all(|v| {
        let mut w = v;
        for _ in 0..n {
            w = images[w];
        }
        images[w] == w
    })
}

/// Scan all maps on `n` vertices (full or canonical, optionally restricted
/// to poset instances) and report the maximum NDS of their ideal families.
pub fn verify_main_theorem(n: usize, opts: &ScanOptions) -> Result<SearchReport> {
    check_enum_ground(n)?;
    let start = Instant::now();
    let total = map_count(n);
    let canonical = opts.canonical_only;
    let posets = opts.posets_only;
    let acc = run_pool(opts.jobs, || {
        let chunk: u64 = 1 << 12;
        let chunks = total.div_ceil(chunk);
        (0..chunks)
            .into_par_iter()
            .map(|c| {
                let mut acc = Accumulator::default();
                for i in c * chunk..((c + 1) * chunk).min(total) {
                    let f = map_from_index(n, i);
                    if canonical && !is_canonical(f.images()) {
                        continue;
                    }
                    if posets && !is_poset_map(f.images()) {
                        continue;
                    }
                    acc.record(i, nds_of_map(&f));
                }
                acc
            })
            .reduce(Accumulator::default, Accumulator::merge)
    })?;
    let witness = |i: u64| serde_json::json!({ "map": map_from_index(n, i).images() });
    Ok(SearchReport {
        n,
        max_stem: None,
        instances_scanned: acc.scanned,
        distinct_up_to_iso: canonical.then_some(acc.scanned),
        max_nds: acc.best.map(|(b, _)| b).unwrap_or(0),
        max_witness: acc.best.map(|(_, i)| witness(i)).unwrap_or(Value::Null),
        counterexamples: finish_counterexamples(acc, witness),
        wall_time: start.elapsed().as_secs_f64(),
    })
}

fn finish_counterexamples(
    mut acc: Accumulator,
    witness: impl Fn(u64) -> Value,
) -> Vec<Counterexample> {
    acc.counterexamples.sort_unstable();
    acc.counterexamples
        .into_iter()
        .map(|(i, nds)| Counterexample {
            index: i.to_string(),
            witness: witness(i),
            nds,
        })
        .collect()
}

// ---------------------------------------------------------------------------
// unique-root family enumeration

/// Per-element rule options: all nonempty stems avoiding the element, of
/// size at most `max_stem`, in mask order; `None` first unless every
/// element must root exactly one rule.
struct FamilySpace {
    n: usize,
    /// stem masks; index 0 is "no rule" in at-most-one mode
    options: Vec<Vec<Option<u64>>>,
    base: u64,
}

impl FamilySpace {
    fn new(n: usize, max_stem: usize, exactly_one: bool) -> Result<FamilySpace> {
        check_enum_ground(n)?;
        if n > 1 && (max_stem < 1 || max_stem > n - 1) {
            return Err(Error::Parameter(format!(
                "max_stem must be in 1..={}, got {max_stem}",
                n - 1
            )));
        }
        let full = (1u64 << n) - 1;
        let options: Vec<Vec<Option<u64>>> = (0..n)
            .map(|r| {
                let mut opts: Vec<Option<u64>> = if exactly_one { vec![] } else { vec![None] };
                for bits in 1..=full {
                    if bits >> r & 1 == 0 && (bits.count_ones() as usize) <= max_stem {
                        opts.push(Some(bits));
                    }
                }
                opts
            })
            .collect();
        let base = options[0].len() as u64;
        if base == 0 {
            return Err(Error::Parameter(
                "no admissible rules under these parameters".into(),
            ));
        }
        if (base as u128).pow(n as u32) > u64::MAX as u128 {
            return Err(Error::Parameter("family index space exceeds 64 bits".into()));
        }
        Ok(FamilySpace { n, options, base })
    }

    fn total(&self) -> u64 {
        self.base.pow(self.n as u32)
    }

    /// `(stem_bits, root)` pairs of the family at `index`, digits decoded
    /// most significant first (element 0 first).
    fn rules_at(&self, index: u64) -> Vec<(u64, usize)> {
        let mut rules = Vec::new();
        let mut i = index;
        for r in (0..self.n).rev() {
            let digit = (i % self.base) as usize;
            i /= self.base;
            if let Some(stem) = self.options[r][digit] {
                rules.push((stem, r));
            }
        }
        rules.reverse();
        rules
    }

    fn family_at(&self, index: u64) -> UniqueRootFamily {
        let rules = self
            .rules_at(index)
            .into_iter()
            .map(|(stem, root)| {
                RootedSet::new(SubsetMask::from_bits(stem, self.n).unwrap(), root).unwrap()
            })
            .collect();
        UniqueRootFamily::new(RootedFamily::new(self.n, rules).unwrap()).unwrap()
    }

    /// NDS of the closure system, by filtering all `2^n` masks.
    fn nds_at(&self, index: u64) -> i64 {
        let rules = self.rules_at(index);
        debug_assert!(rules.iter().all(|&(stem, _)| stem != 0));
        let n = self.n;
        let mut members: i64 = 0;
        let mut total: i64 = 0;
        for bits in 0u64..1 << n {
            if rules
                .iter()
                .all(|&(stem, root)| bits & stem != stem || bits >> root & 1 == 1)
            {
                members += 1;
                total += bits.count_ones() as i64;
            }
        }
        2 * total - members * n as i64
    }
}

/// Number of rule options per element: `sum_{k=1..max_stem} C(n-1, k)`,
/// plus one for "no rule" in at-most-one mode.
pub fn options_per_element(n: usize, max_stem: usize, exactly_one: bool) -> Result<u64> {
    Ok(FamilySpace::new(n, max_stem, exactly_one)?.base)
}

pub fn family_count(n: usize, max_stem: usize, exactly_one: bool) -> Result<u64> {
    Ok(FamilySpace::new(n, max_stem, exactly_one)?.total())
}

/// All unique-root families in index order.
pub fn enumerate_unique_root_families(
    n: usize,
    max_stem: usize,
    exactly_one: bool,
) -> Result<impl Iterator<Item = UniqueRootFamily>> {
    let space = FamilySpace::new(n, max_stem, exactly_one)?;
    Ok((0..space.total()).map(move |i| space.family_at(i)))
}

/// NDS the miner computes for the family at a given index, exposed so an
/// independent recomputation can be checked against it.
pub fn miner_nds_at(n: usize, max_stem: usize, exactly_one: bool, index: u64) -> Result<i64> {
    let space = FamilySpace::new(n, max_stem, exactly_one)?;
    if index >= space.total() {
        return Err(Error::Parameter(format!("index {index} out of range")));
    }
    Ok(space.nds_at(index))
}

/// The family at a given enumeration index, for witness decoding and tests.
pub fn unique_root_family_at(
    n: usize,
    max_stem: usize,
    exactly_one: bool,
    index: u64,
) -> Result<UniqueRootFamily> {
    let space = FamilySpace::new(n, max_stem, exactly_one)?;
    if index >= space.total() {
        return Err(Error::Parameter(format!("index {index} out of range")));
    }
    Ok(space.family_at(index))
}

#[derive(Serialize, Deserialize)]
struct CursorFile {
    n: usize,
    max_stem: usize,
    next_index: String,
}

#[derive(Serialize, Deserialize)]
struct PartialState {
    acc: Accumulator,
}

fn partial_path(cursor: &Path) -> PathBuf {
    let mut os = cursor.as_os_str().to_owned();
    os.push(".partial");
    PathBuf::from(os)
}

/// Exhaustively scan the unique-root family space, reporting every closure
/// system with positive NDS.  With a cursor path the scan checkpoints its
/// position and partial aggregate and resumes from them on restart.
pub fn mine_conjecture(n: usize, max_stem: usize, opts: &MineOptions) -> Result<SearchReport> {
    let space = FamilySpace::new(n, max_stem, opts.exactly_one)?;
    let start = Instant::now();
    let total = space.total();

    let mut acc = Accumulator::default();
    let mut next: u64 = 0;
    if let Some(cursor) = &opts.cursor {
        if cursor.exists() {
            let c: CursorFile = serde_json::from_str(
                &fs::read_to_string(cursor)
                    .map_err(|e| Error::Parameter(format!("cursor read: {e}")))?,
            )
            .map_err(|e| Error::Parameter(format!("cursor parse: {e}")))?;
            if c.n != n || c.max_stem != max_stem {
                return Err(Error::Parameter(
                    "cursor file belongs to different parameters".into(),
                ));
            }
            next = c
                .next_index
                .parse()
                .map_err(|e| Error::Parameter(format!("cursor index: {e}")))?;
            let p = partial_path(cursor);
            if p.exists() {
                let state: PartialState = serde_json::from_str(
                    &fs::read_to_string(&p)
                        .map_err(|e| Error::Parameter(format!("partial read: {e}")))?,
                )
                .map_err(|e| Error::Parameter(format!("partial parse: {e}")))?;
                acc = state.acc;
            }
        }
    }

    let super_chunk = if opts.cursor.is_some() {
        opts.checkpoint_every.max(1)
    } else {
        total.max(1)
    };
    while next < total {
        let end = next.saturating_add(super_chunk).min(total);
        let space_ref = &space;
        let part = run_pool(opts.jobs, || {
            let chunk: u64 = 1 << 10;
            let chunks = (end - next).div_ceil(chunk);
            (0..chunks)
                .into_par_iter()
                .map(|c| {
                    let mut acc = Accumulator::default();
                    let lo = next + c * chunk;
                    for i in lo..(lo + chunk).min(end) {
                        acc.record(i, space_ref.nds_at(i));
                    }
                    acc
                })
                .reduce(Accumulator::default, Accumulator::merge)
        })?;
        acc = acc.merge(part);
        next = end;
        if let Some(cursor) = &opts.cursor {
            let c = CursorFile {
                n,
                max_stem,
                next_index: next.to_string(),
            };
            fs::write(cursor, serde_json::to_string_pretty(&c).unwrap())
                .map_err(|e| Error::Parameter(format!("cursor write: {e}")))?;
            fs::write(
                partial_path(cursor),
                serde_json::to_string(&PartialState { acc: acc.clone() }).unwrap(),
            )
            .map_err(|e| Error::Parameter(format!("partial write: {e}")))?;
        }
    }

    let witness = |i: u64| {
        serde_json::json!({
            "index": i.to_string(),
            "rules": serde_json::to_value(space.family_at(i).family()).unwrap(),
        })
    };
    Ok(SearchReport {
        n,
        max_stem: Some(max_stem),
        instances_scanned: acc.scanned,
        distinct_up_to_iso: None,
        max_nds: acc.best.map(|(b, _)| b).unwrap_or(0),
        max_witness: acc.best.map(|(_, i)| witness(i)).unwrap_or(Value::Null),
        counterexamples: finish_counterexamples(acc, witness),
        wall_time: start.elapsed().as_secs_f64(),
    })
}

/// Independent NDS oracle for a rooted family: enumerate all subsets
/// against the rules directly, without the miner's decode path.
pub fn nds_by_direct_filter(family: &RootedFamily) -> i64 {
    family.closure_system().nds()
}

/// Inverse of `map_from_index`.
pub fn map_index_of(images: &[usize]) -> u64 {
    map_to_index(images)
}
