//! Exhaustive checks for threshold behaviour and the structural necessary
//! conditions a key distribution must meet.

use std::collections::{BTreeSet, HashMap};

use itertools::Itertools;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{
    check_limit, KeyDistribution, PadlockId, ThresholdSystem, DEFAULT_ENUMERATION_LIMIT,
};

/// Outcome of a k-threshold check, with the lexicographically smallest
/// counterexample of each kind.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub verdict: bool,
    pub k: usize,
    pub n: usize,
    pub padlocks: usize,
    /// A coalition of size `k` that cannot open.
    pub failing_open: Option<Vec<usize>>,
    /// A coalition of size `k - 1` that can open.
    pub failing_closed: Option<Vec<usize>>,
}

/// Checks layers `k` and `k - 1` of the coalition lattice against `opens`.
///
/// Opening is monotone for circuits and for free-group words alike, so the
/// two layers decide the threshold property.
pub fn verify_layers<F>(
    n: usize,
    k: usize,
    padlocks: usize,
    limit: usize,
    opens: F,
) -> Result<VerificationReport>
where
    F: Fn(&[usize]) -> bool + Sync,
{
    if k == 0 || k > n {
        return Err(Error::parameter(format!("threshold {k} outside 1..={n}")));
    }
    check_limit(n, limit)?;
    let first_failure = |size: usize, want: bool| -> Option<Vec<usize>> {
        let layer: Vec<Vec<usize>> = (0..n).combinations(size).collect();
        layer.into_par_iter().find_first(|c| opens(c) != want)
    };
    let failing_open = first_failure(k, true);
    let failing_closed = first_failure(k - 1, false);
    Ok(VerificationReport {
        verdict: failing_open.is_none() && failing_closed.is_none(),
        k,
        n,
        padlocks,
        failing_open,
        failing_closed,
    })
}

pub fn verify_threshold(system: &ThresholdSystem, k: usize) -> Result<VerificationReport> {
    verify_threshold_limited(system, k, DEFAULT_ENUMERATION_LIMIT)
}

pub fn verify_threshold_limited(
    system: &ThresholdSystem,
    k: usize,
    limit: usize,
) -> Result<VerificationReport> {
    let sets = system.keys().as_sets();
    verify_layers(
        system.participants(),
        k,
        system.padlock_count(),
        limit,
        |c| {
            let mask = c.iter().fold(0u64, |m, p| m | (1 << p));
            system.mask_open(&sets, mask)
        },
    )
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpernerCheck {
    pub antichain: bool,
    /// `(a, b)` with the keys of `a` contained in the keys of `b`.
    pub offending: Option<(usize, usize)>,
}

/// Whether no participant's key set is contained in another's.
pub fn check_sperner(keys: &KeyDistribution) -> SpernerCheck {
    let sets = keys.as_sets();
    let offending = (0..sets.len())
        .cartesian_product(0..sets.len())
        .find(|&(a, b)| a != b && sets[a].is_subset(&sets[b]));
    SpernerCheck {
        antichain: offending.is_none(),
        offending,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NecessaryConditionReport {
    pub holds: bool,
    /// Participants holding at least one key nobody else holds.
    pub sole_key_owners: Vec<usize>,
    /// Participants all of whose keys are also held by someone else.
    pub shared_only: Vec<usize>,
    /// First ordered pair `(a, b)` with `|A \ B| < k - 1`, and that difference.
    pub short_difference: Option<(usize, usize, usize)>,
    /// First participant with fewer than `k` keys, and its key count.
    pub too_few_keys: Option<(usize, usize)>,
}

/// Necessary condition for a `k`-threshold system (`k >= 3`) with fewer
/// padlocks than participants: among participants holding only shared keys,
/// every pairwise set difference has at least `k - 1` keys and everyone
/// holds at least `k` keys.
pub fn check_necessary_condition(
    keys: &KeyDistribution,
    k: usize,
) -> Result<NecessaryConditionReport> {
    if k < 3 {
        return Err(Error::parameter(format!(
            "necessary condition needs k >= 3, got {k}"
        )));
    }
    let padlocks = keys
        .distinct_keys()
        .iter()
        .next_back()
        .map_or(0, |p| p.index() + 1);
    let owners = keys.owner_counts(padlocks);
    let (shared_only, sole_key_owners): (Vec<usize>, Vec<usize>) = (0..keys.participants())
        .partition(|&p| keys.keys_of(p).iter().all(|id| owners[id.index()] >= 2));

    let sets: Vec<BTreeSet<PadlockId>> = shared_only
        .iter()
        .map(|&p| keys.keys_of(p).iter().copied().collect())
        .collect();
    let too_few_keys = shared_only
        .iter()
        .zip(&sets)
        .find(|(_, s)| s.len() < k)
        .map(|(p, s)| (*p, s.len()));
    let short_difference = (0..sets.len())
        .cartesian_product(0..sets.len())
        .filter(|(a, b)| a != b)
        .map(|(a, b)| {
            (
                shared_only[a],
                shared_only[b],
                sets[a].difference(&sets[b]).count(),
            )
        })
        .find(|(_, _, d)| *d < k - 1);
    Ok(NecessaryConditionReport {
        holds: too_few_keys.is_none() && short_difference.is_none(),
        sole_key_owners,
        shared_only,
        short_difference,
        too_few_keys,
    })
}

/// Every `p`-subset that lies in more than `lambda` blocks, with its count.
pub fn packing_violations<B: AsRef<[u32]>>(
    blocks: &[B],
    p: usize,
    lambda: usize,
) -> Result<Vec<(Vec<u32>, usize)>> {
    if p < 2 {
        return Err(Error::parameter(format!("packing needs p >= 2, got {p}")));
    }
    let mut counts: HashMap<Vec<u32>, usize> = HashMap::new();
    for block in blocks {
        let mut b = block.as_ref().to_vec();
        b.sort_unstable();
        b.dedup();
        for subset in b.into_iter().combinations(p) {
            *counts.entry(subset).or_default() += 1;
        }
    }
    let mut bad: Vec<(Vec<u32>, usize)> = counts.into_iter().filter(|(_, c)| *c > lambda).collect();
    bad.sort();
    Ok(bad)
}

/// Whether every `p`-subset of the ground set lies in at most `lambda` blocks.
pub fn check_packing<B: AsRef<[u32]>>(blocks: &[B], p: usize, lambda: usize) -> Result<bool> {
    Ok(packing_violations(blocks, p, lambda)?.is_empty())
}

pub type Triad = [u32; 3];

fn union_size(blocks: &[&Triad]) -> usize {
    blocks
        .iter()
        .flat_map(|b| b.iter())
        .collect::<BTreeSet<_>>()
        .len()
}

/// Indices of all unordered triples of triads whose union has six keys.
pub fn six_key_triples(blocks: &[Triad]) -> Vec<[usize; 3]> {
    (0..blocks.len())
        .tuple_combinations()
        .filter(|&(a, b, c)| union_size(&[&blocks[a], &blocks[b], &blocks[c]]) == 6)
        .map(|(a, b, c)| [a, b, c])
        .collect()
}

pub fn count_six_key_triples(blocks: &[Triad]) -> usize {
    six_key_triples(blocks).len()
}

/// Indices of all unordered pairs of triads whose union has six keys.
pub fn six_key_pairs(blocks: &[Triad]) -> Vec<[usize; 2]> {
    (0..blocks.len())
        .tuple_combinations()
        .filter(|&(a, b)| union_size(&[&blocks[a], &blocks[b]]) == 6)
        .map(|(a, b)| [a, b])
        .collect()
}

/// Whether no pair of triads covers the same keys as a six-key triple.
pub fn six_key_triples_beyond_pairs(blocks: &[Triad]) -> bool {
    let key_set =
        |idx: &[usize]| -> BTreeSet<u32> { idx.iter().flat_map(|i| blocks[*i]).collect() };
    let pair_unions: BTreeSet<BTreeSet<u32>> = (0..blocks.len())
        .tuple_combinations()
        .map(|(a, b)| key_set(&[a, b]))
        .collect();
    six_key_triples(blocks)
        .iter()
        .all(|t| !pair_unions.contains(&key_set(t)))
}
