//! The reduction machinery as executable, checked steps: tracing a
//! non-singleton class, deleting the root of a connected rooted forest,
//! splitting a disconnected map into components, and a certificate that
//! replays the whole chain down to single vertices.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::family::SetFamily;
use crate::ideals::ideals_bruteforce;
use crate::preorder::FunctionalMap;

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum StepKind {
    TraceClass,
    DeleteRoot,
    SplitComponents,
    BaseSingleton,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ReductionStep {
    pub kind: StepKind,
    pub input_map: FunctionalMap,
    pub output_maps: Vec<FunctionalMap>,
    /// Local index of the removed element for trace/delete steps.
    pub removed: Option<usize>,
    pub nds_before: i64,
    pub nds_after: Vec<i64>,
}

/// A checked reduction of one map down to single-vertex leaves.  Steps are
/// listed depth-first: each step's outputs are consumed by the immediately
/// following steps (first output first).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ReductionCertificate {
    pub input: FunctionalMap,
    pub steps: Vec<ReductionStep>,
    pub conclusion_nds: i64,
}

/// External JSON form; maps at intermediate steps are recomputed on replay.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct CertificateRecord {
    pub input: Vec<usize>,
    pub steps: Vec<StepRecord>,
    pub conclusion_nds: i64,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct StepRecord {
    pub kind: StepKind,
    pub removed: Option<usize>,
    pub nds_before: i64,
    pub nds_after: Vec<i64>,
}

fn nds_bf(f: &FunctionalMap) -> i64 {
    ideals_bruteforce(f).family().nds()
}

fn count_bf(f: &FunctionalMap) -> i64 {
    ideals_bruteforce(f).family().len() as i64
}

/// Build the map on `[0, n-1)` that sends the old vertex `v` (!= removed)
/// to `image(v)`, renumbering indices above `removed` downward.
fn remove_vertex(
    f: &FunctionalMap,
    removed: usize,
    image: impl Fn(usize) -> usize,
) -> FunctionalMap {
    let n = f.ground_size();
    let shift = |v: usize| if v > removed { v - 1 } else { v };
    let images = (0..n)
        .filter(|&v| v != removed)
        .map(|v| shift(image(v)))
        .collect();
    FunctionalMap::new(images).unwrap()
}

/// Remove `u`, an element of an equivalence class of size >= 2, routing
/// everything that mapped to `u` through `f` twice.
pub fn trace_class_step(f: &FunctionalMap, u: usize) -> Result<FunctionalMap> {
    let n = f.ground_size();
    if u >= n {
        return Err(Error::ElementOutOfRange { element: u, n });
    }
    let part = f.preorder().equiv_classes();
    if part.classes()[part.class_of(u)].len() < 2 {
        return Err(Error::SingletonClass(u));
    }
    Ok(remove_vertex(f, u, |v| {
        if f.apply(v) == u {
            f.apply(f.apply(v))
        } else {
            f.apply(v)
        }
    }))
}

/// Remove the root `x` of a connected rooted-forest poset; everything that
/// pointed at `x` becomes a fixed point.  The deletion identity
/// `nds(I(V)) = nds(I(V')) + (|V| - |I(V)| + 1)` is verified.
pub fn delete_root_step(f: &FunctionalMap, x: usize) -> Result<FunctionalMap> {
    let n = f.ground_size();
    if x >= n {
        return Err(Error::ElementOutOfRange { element: x, n });
    }
    if let Some((u, v)) = f.preorder().poset_violation() {
        return Err(Error::NotAPoset { u, v });
    }
    if f.components().len() != 1 {
        return Err(Error::NotConnected);
    }
    if f.apply(x) != x {
        return Err(Error::NotARoot(x));
    }
    let g = remove_vertex(f, x, |v| if f.apply(v) == x { v } else { f.apply(v) });
    let term = n as i64 - count_bf(f) + 1;
    if nds_bf(f) != nds_bf(&g) + term {
        return Err(Error::Inconsistent(format!(
            "deletion identity failed for {f} at root {x}"
        )));
    }
    Ok(g)
}

/// Restrict a disconnected map to each of its weak components, indices
/// compacted per part in increasing order.
pub fn split_step(f: &FunctionalMap) -> Result<Vec<FunctionalMap>> {
    let comps = f.components();
    if comps.len() < 2 {
        return Err(Error::AlreadyConnected);
    }
    Ok(comps.iter().map(|c| restrict_to(f, c.bits())).collect())
}

fn restrict_to(f: &FunctionalMap, mask: u64) -> FunctionalMap {
    let verts: Vec<usize> = (0..f.ground_size()).filter(|&v| mask >> v & 1 == 1).collect();
    let local: std::collections::HashMap<usize, usize> =
        verts.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    FunctionalMap::new(verts.iter().map(|&v| local[&f.apply(v)]).collect()).unwrap()
}

/// `sum |A∪B| = |F2| sum|A| + |F1| sum|B| - sum |A∩B|` over ordered pairs.
pub fn union_sum_check(f1: &SetFamily, f2: &SetFamily) -> Result<bool> {
    if f1.ground_size() != f2.ground_size() {
        return Err(Error::GroundMismatch(f1.ground_size(), f2.ground_size()));
    }
    let mut lhs: i64 = 0;
    let mut inter: i64 = 0;
    for a in f1.members() {
        for b in f2.members() {
            lhs += a.union(b).len() as i64;
            inter += a.intersection(b).len() as i64;
        }
    }
    let rhs = f2.len() as i64 * f1.total_size() as i64
        + f1.len() as i64 * f2.total_size() as i64
        - inter;
    Ok(lhs == rhs)
}

/// Reduce `f` to single vertices, checking every verdict along the way.
/// Trace order: within the first non-singleton class, remove the largest
/// index first.  Poset phase splits components before deleting roots.
pub fn certify(f: &FunctionalMap) -> Result<ReductionCertificate> {
    if f.ground_size() == 0 {
        return Err(Error::Parameter("certify needs a nonempty ground set".into()));
    }
    let mut steps = Vec::new();
    let mut m = f.clone();
    loop {
        let part = m.preorder().equiv_classes();
        let Some(class) = part.classes().iter().find(|c| c.len() >= 2) else {
            break;
        };
        let u = class.elems().into_iter().max().unwrap();
        let g = trace_class_step(&m, u)?;
        let (before, after) = (nds_bf(&m), nds_bf(&g));
        if before > after {
            return Err(Error::Inconsistent(format!(
                "trace inequality failed for {m} at {u}"
            )));
        }
        steps.push(ReductionStep {
            kind: StepKind::TraceClass,
            input_map: m.clone(),
            output_maps: vec![g.clone()],
            removed: Some(u),
            nds_before: before,
            nds_after: vec![after],
        });
        m = g;
    }
    certify_poset(&m, &mut steps)?;
    let conclusion_nds = steps[0].nds_before;
    if conclusion_nds > 0 {
        return Err(Error::Inconsistent(format!(
            "chained verdicts ended positive for {f}"
        )));
    }
    Ok(ReductionCertificate {
        input: f.clone(),
        steps,
        conclusion_nds,
    })
}

fn certify_poset(m: &FunctionalMap, steps: &mut Vec<ReductionStep>) -> Result<()> {
    let n = m.ground_size();
    if n == 1 {
        let before = nds_bf(m);
        if before != 0 {
            return Err(Error::Inconsistent("singleton with nonzero nds".into()));
        }
        steps.push(ReductionStep {
            kind: StepKind::BaseSingleton,
            input_map: m.clone(),
            output_maps: vec![],
            removed: None,
            nds_before: before,
            nds_after: vec![],
        });
        return Ok(());
    }
    let comps = m.components();
    if comps.len() >= 2 {
        // two-way split: first component against the rest
        let first = restrict_to(m, comps[0].bits());
        let rest_mask = comps[1..].iter().fold(0u64, |acc, c| acc | c.bits());
        let rest = restrict_to(m, rest_mask);
        let before = nds_bf(m);
        let (nds1, nds2) = (nds_bf(&first), nds_bf(&rest));
        let (m1, m2) = (count_bf(&first), count_bf(&rest));
        if before != m2 * nds1 + m1 * nds2 {
            return Err(Error::Inconsistent(format!("product identity failed for {m}")));
        }
        steps.push(ReductionStep {
            kind: StepKind::SplitComponents,
            input_map: m.clone(),
            output_maps: vec![first.clone(), rest.clone()],
            removed: None,
            nds_before: before,
            nds_after: vec![nds1, nds2],
        });
        certify_poset(&first, steps)?;
        certify_poset(&rest, steps)
    } else {
        let root = (0..n)
            .find(|&v| m.apply(v) == v)
            .ok_or_else(|| Error::Inconsistent(format!("no fixed point in poset {m}")))?;
        let before = nds_bf(m);
        let term = n as i64 - count_bf(m) + 1;
        if term > 0 {
            return Err(Error::Inconsistent(format!(
                "ideal count below |V|+1 for {m}"
            )));
        }
        let g = delete_root_step(m, root)?;
        steps.push(ReductionStep {
            kind: StepKind::DeleteRoot,
            input_map: m.clone(),
            output_maps: vec![g.clone()],
            removed: Some(root),
            nds_before: before,
            nds_after: vec![before - term],
        });
        certify_poset(&g, steps)
    }
}

impl ReductionCertificate {
    pub fn record(&self) -> CertificateRecord {
        CertificateRecord {
            input: self.input.images().to_vec(),
            steps: self
                .steps
                .iter()
                .map(|s| StepRecord {
                    kind: s.kind,
                    removed: s.removed,
                    nds_before: s.nds_before,
                    nds_after: s.nds_after.clone(),
                })
                .collect(),
            conclusion_nds: self.conclusion_nds,
        }
    }
}

/// Replay a certificate record from scratch, recomputing every family by
/// brute-force enumeration and checking every stored value and verdict.
pub fn verify_certificate(record: &CertificateRecord) -> Result<()> {
    let input = FunctionalMap::new(record.input.clone())?;
    let mut stack = vec![input];
    let mut first = true;
    for step in &record.steps {
        let m = stack
            .pop()
            .ok_or_else(|| Error::Inconsistent("more steps than pending maps".into()))?;
        let before = nds_bf(&m);
        if before != step.nds_before {
            return Err(Error::Inconsistent(format!(
                "stored nds_before {} != recomputed {} for {m}",
                step.nds_before, before
            )));
        }
        if first {
            if record.conclusion_nds != before {
                return Err(Error::Inconsistent("conclusion differs from root nds".into()));
            }
            first = false;
        }
        match step.kind {
            StepKind::BaseSingleton => {
                if m.ground_size() != 1 || before != 0 || !step.nds_after.is_empty() {
                    return Err(Error::Inconsistent("bad base step".into()));
                }
            }
            StepKind::TraceClass => {
                let u = step
                    .removed
                    .ok_or_else(|| Error::Inconsistent("trace step without element".into()))?;
                let g = trace_class_step(&m, u)?;
                let after = nds_bf(&g);
                if step.nds_after != vec![after] || before > after {
                    return Err(Error::Inconsistent(format!("trace verdict failed for {m}")));
                }
                stack.push(g);
            }
            StepKind::DeleteRoot => {
                let x = step
                    .removed
                    .ok_or_else(|| Error::Inconsistent("delete step without root".into()))?;
                let g = delete_root_step(&m, x)?;
                let after = nds_bf(&g);
                let term = m.ground_size() as i64 - count_bf(&m) + 1;
                if step.nds_after != vec![after] || before != after + term || term > 0 {
                    return Err(Error::Inconsistent(format!("delete verdict failed for {m}")));
                }
                stack.push(g);
            }
            StepKind::SplitComponents => {
                let comps = m.components();
                if comps.len() < 2 {
                    return Err(Error::AlreadyConnected);
                }
                let left = restrict_to(&m, comps[0].bits());
                let rest_mask = comps[1..].iter().fold(0u64, |acc, c| acc | c.bits());
                let right = restrict_to(&m, rest_mask);
                let (nds1, nds2) = (nds_bf(&left), nds_bf(&right));
                if step.nds_after != vec![nds1, nds2]
                    || before != count_bf(&right) * nds1 + count_bf(&left) * nds2
                {
                    return Err(Error::Inconsistent(format!("split verdict failed for {m}")));
                }
                stack.push(right);
                stack.push(left);
            }
        }
    }
    if !stack.is_empty() {
        return Err(Error::Inconsistent("unconsumed maps after final step".into()));
    }
    if record.conclusion_nds > 0 {
        return Err(Error::Inconsistent("positive conclusion".into()));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::SetFamily;

    fn map(images: &[usize]) -> FunctionalMap {
        FunctionalMap::new(images.to_vec()).unwrap()
    }

    #[test]
    fn trace_class_examples() {
        // f(a)=b, f(b)=c, f(c)=b; tracing c leaves the two-element chain
        let g = trace_class_step(&map(&[1, 2, 1]), 2).unwrap();
        assert_eq!(g.images(), &[1, 1]);
        assert_eq!(
            ideals_bruteforce(&g).family(),
            &SetFamily::from_masks(2, [0b00, 0b01, 0b11]).unwrap()
        );
        // cross-check against the trace of the original ideal family
        assert_eq!(
            ideals_bruteforce(&map(&[1, 2, 1])).family().trace_at(2).unwrap(),
            *ideals_bruteforce(&g).family()
        );

        let g = trace_class_step(&map(&[1, 0]), 1).unwrap();
        assert_eq!(g.images(), &[0]);

        assert_eq!(
            trace_class_step(&map(&[1, 1]), 1),
            Err(Error::SingletonClass(1))
        );
    }

    #[test]
    fn delete_root_examples() {
        // chain a<b<c
        let g = delete_root_step(&map(&[1, 2, 2]), 2).unwrap();
        assert_eq!(g.images(), &[1, 1]);

        // star a,b<c: both leaves become fixed points
        let f = map(&[2, 2, 2]);
        let g = delete_root_step(&f, 2).unwrap();
        assert_eq!(g.images(), &[0, 1]);
        assert_eq!(nds_bf(&f), -1);
        assert_eq!(nds_bf(&g), 0);

        let g = delete_root_step(&map(&[0]), 0).unwrap();
        assert_eq!(g.ground_size(), 0);

        assert_eq!(delete_root_step(&map(&[1, 2, 2]), 0), Err(Error::NotARoot(0)));
        assert_eq!(delete_root_step(&map(&[0, 1]), 0), Err(Error::NotConnected));
        assert!(matches!(
            delete_root_step(&map(&[1, 2, 1]), 1),
            Err(Error::NotAPoset { .. })
        ));
    }

    #[test]
    fn split_examples() {
        let parts = split_step(&map(&[0, 1])).unwrap();
        assert_eq!(parts.len(), 2);
        assert_eq!(parts[0].images(), &[0]);

        let parts = split_step(&map(&[1, 1, 3, 3])).unwrap();
        assert_eq!(parts[0].images(), &[1, 1]);
        assert_eq!(parts[1].images(), &[1, 1]);

        assert_eq!(split_step(&map(&[1, 1])), Err(Error::AlreadyConnected));
    }

    #[test]
    fn split_product_identity_small() {
        // chain of two plus star of three on five vertices
        let f = map(&[1, 1, 4, 4, 4]);
        let parts = split_step(&f).unwrap();
        let (a, b) = (&parts[0], &parts[1]);
        assert_eq!(
            nds_bf(&f),
            count_bf(b) * nds_bf(a) + count_bf(a) * nds_bf(b)
        );
        assert_eq!(nds_bf(&f), 5 * 0 + 3 * -1);
    }

    #[test]
    fn union_sum_examples() {
        let f1 = SetFamily::from_masks(2, [0b00, 0b01]).unwrap();
        let f2 = SetFamily::from_masks(2, [0b10]).unwrap();
        assert!(union_sum_check(&f1, &f2).unwrap());
        let e = SetFamily::from_masks(1, [0]).unwrap();
        assert!(union_sum_check(&e, &e).unwrap());
        assert!(union_sum_check(&f1, &e).is_err());
    }

    #[test]
    fn certify_examples() {
        let cert = certify(&map(&[1, 1])).unwrap();
        let kinds: Vec<StepKind> = cert.steps.iter().map(|s| s.kind).collect();
        assert_eq!(kinds, vec![StepKind::DeleteRoot, StepKind::BaseSingleton]);
        assert_eq!(cert.conclusion_nds, 0);

        let cert = certify(&map(&[1, 2, 1])).unwrap();
        let kinds: Vec<StepKind> = cert.steps.iter().map(|s| s.kind).collect();
        assert_eq!(
            kinds,
            vec![StepKind::TraceClass, StepKind::DeleteRoot, StepKind::BaseSingleton]
        );
        assert_eq!(cert.steps[0].removed, Some(2));
        assert_eq!(cert.conclusion_nds, -1);
        assert_eq!(cert.steps[0].nds_before, -1);
        assert_eq!(cert.steps[0].nds_after, vec![0]);

        let cert = certify(&map(&[0])).unwrap();
        assert_eq!(cert.steps.len(), 1);
        assert_eq!(cert.steps[0].kind, StepKind::BaseSingleton);
        assert_eq!(cert.conclusion_nds, 0);
    }

    #[test]
    fn certificates_replay() {
        for images in [
            vec![1usize, 1],
            vec![1, 2, 1],
            vec![0, 1, 2],
            vec![1, 0, 3, 3],
            vec![2, 2, 2, 1, 0],
        ] {
            let f = map(&images);
            let cert = certify(&f).unwrap();
            verify_certificate(&cert.record()).unwrap();
        }
    }

    #[test]
    fn tampered_certificate_rejected() {
        let mut rec = certify(&map(&[1, 2, 1])).unwrap().record();
        rec.steps[0].nds_before += 1;
        assert!(verify_certificate(&rec).is_err());

        let mut rec = certify(&map(&[1, 2, 1])).unwrap().record();
        rec.conclusion_nds = 1;
        assert!(verify_certificate(&rec).is_err());
    }
}
