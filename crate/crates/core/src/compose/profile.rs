use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::lts::{class_index, ClassCount, DeclaredSync, ProductSpec};

/// Largest constraint handled by [`profile_from_explicit`]; all `2^|C|`
/// subsets are tabulated.
pub const MAX_PROFILE_TUPLES: usize = 6;

/// Synchronization data the composer needs about a product.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SyncProfile {
    /// `ind(~_{C'})` per nonempty subset of tuple indices (sorted).
    pub ind: BTreeMap<Vec<usize>, usize>,
    /// Per tuple, per component in `X_c̄`: number of states enabling the tuple's letter.
    pub enabled: Vec<BTreeMap<usize, usize>>,
    /// Per component, per subset: size of the union of enabled sets over the
    /// subset's tuples, when known exactly.
    pub enabled_union: BTreeMap<(usize, Vec<usize>), usize>,
}

impl SyncProfile {
    pub fn ind(&self, subset: &[usize]) -> Result<usize> {
        self.ind
            .get(subset)
            .copied()
            .ok_or_else(|| Error::InvalidSystem(format!("profile has no entry for {subset:?}")))
    }

    /// `l(C') = Σ_{∅≠C''⊊C'} ind(~_{C''})`.
    pub fn l(&self, subset: &[usize]) -> Result<usize> {
        let mut total = 0;
        for sub in proper_subsets(subset) {
            total += self.ind(&sub)?;
        }
        Ok(total)
    }

    /// Upper bound on the number of synchronized steps a shortest
    /// `Σˡ ∪ C'`-path needs.
    ///
    /// Along a path, record for every synchronizing component the state from
    /// which it will perform its next synchronized step (or "none"). If this
    /// vector repeats, the steps in between can be cut out, so a shortest
    /// path has fewer steps than there are such vectors.
    pub fn word_depth(&self, subset: &[usize]) -> Result<u128> {
        if subset.len() == 1 {
            return Ok(self.ind(subset)? as u128);
        }
        let mut comps: BTreeSet<usize> = BTreeSet::new();
        for &t in subset {
            let e = self.enabled.get(t).ok_or_else(|| {
                Error::InvalidSystem(format!("profile has no tuple #{t}"))
            })?;
            comps.extend(e.keys().copied());
        }
        let mut vectors: u128 = 1;
        for i in comps {
            let size = match self.enabled_union.get(&(i, subset.to_vec())) {
                Some(&u) => u,
                None => subset
                    .iter()
                    .filter_map(|&t| self.enabled[t].get(&i))
                    .sum(),
            };
            vectors = vectors.saturating_mul(size as u128 + 1);
        }
        Ok(vectors - 1)
    }
}

/// Nonempty proper subsets of a sorted index list, each sorted.
pub fn proper_subsets(subset: &[usize]) -> Vec<Vec<usize>> {
    let n = subset.len();
    (1..(1usize << n) - 1)
        .map(|mask| {
            (0..n)
                .filter(|b| mask >> b & 1 == 1)
                .map(|b| subset[b])
                .collect()
        })
        .collect()
}

/// All nonempty subsets of `0..n`, sorted.
pub fn nonempty_subsets(n: usize) -> Vec<Vec<usize>> {
    (1..1usize << n)
        .map(|mask| (0..n).filter(|b| mask >> b & 1 == 1).collect())
        .collect()
}

pub fn profile_from_explicit(spec: &ProductSpec) -> Result<SyncProfile> {
    let c = spec.constraint().len();
    if c > MAX_PROFILE_TUPLES {
        return Err(Error::Unsupported(format!(
            "profile of {c} constraint tuples exceeds the limit of {MAX_PROFILE_TUPLES}"
        )));
    }
    let enabled_sets: Vec<BTreeMap<usize, BTreeSet<u32>>> = spec
        .constraint()
        .tuples
        .iter()
        .map(|t| {
            t.sync_components()
                .into_iter()
                .map(|i| (i, spec.enabled_states(i, t.entry(i).expect("sync entry"))))
                .collect()
        })
        .collect();
    let mut ind = BTreeMap::new();
    let mut enabled_union = BTreeMap::new();
    for subset in nonempty_subsets(c) {
        ind.insert(subset.clone(), class_index(spec, &subset)?);
        let mut unions: BTreeMap<usize, BTreeSet<u32>> = BTreeMap::new();
        for &t in &subset {
            for (&i, set) in &enabled_sets[t] {
                unions.entry(i).or_default().extend(set.iter().copied());
            }
        }
        for (i, set) in unions {
            enabled_union.insert((i, subset.clone()), set.len());
        }
    }
    Ok(SyncProfile {
        ind,
        enabled: enabled_sets
            .iter()
            .map(|m| m.iter().map(|(&i, s)| (i, s.len())).collect())
            .collect(),
        enabled_union,
    })
}

/// Profile of a product known only through declared enabled-state counts.
///
/// `ind(~_{C'})` for larger subsets is bounded by the product of the member
/// tuples' indices.
pub fn profile_from_declared(decl: &DeclaredSync) -> Result<SyncProfile> {
    let c = decl.constraint.len();
    if c > MAX_PROFILE_TUPLES {
        return Err(Error::Unsupported(format!(
            "profile of {c} constraint tuples exceeds the limit of {MAX_PROFILE_TUPLES}"
        )));
    }
    let mut enabled = Vec::with_capacity(c);
    for (t, counts) in decl.enabled.iter().enumerate() {
        let mut m = BTreeMap::new();
        for (&i, count) in counts {
            match count {
                ClassCount::Finite(k) => {
                    m.insert(i, *k);
                }
                ClassCount::Infinite => {
                    return Err(Error::InvalidSystem(format!(
                        "tuple {} is not finitely synchronized",
                        decl.constraint.tuples[t]
                    )))
                }
            }
        }
        enabled.push(m);
    }
    let single: Vec<usize> = enabled.iter().map(|m| m.values().product()).collect();
    let ind = nonempty_subsets(c)
        .into_iter()
        .map(|s| {
            let bound = s.iter().map(|&t| single[t]).product();
            (s, bound)
        })
        .collect();
    Ok(SyncProfile {
        ind,
        enabled,
        enabled_union: BTreeMap::new(),
    })
}
